use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bcb() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bcb"));
    cmd.env_remove("BCB_BACKEND");
    cmd
}

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("bcb runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).expect("utf-8 stdout"),
        String::from_utf8(stderr).expect("utf-8 stderr"),
    )
}

fn write_problem(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("problem.json");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn classify_prints_headline_counts_and_census() {
    let (code, out, _) = run(bcb().arg("classify").arg(problem("persistence.json")));
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("scenario (i): persistence, no period-two"));
    assert!(out.contains("sigma_L+  = 0"));
    assert!(out.contains("census μ<0: x^L stable"));
    assert!(out.contains("census μ>0: x^R stable"));

    let (code, out, _) = run(bcb().arg("classify").arg(problem("fold_cycle.json")));
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("scenario (iv): x^L, x^R and LR-cycle admissible for μ>0"));
    assert!(out.contains("census μ<0: empty"));
}

#[test]
fn float_backend_from_environment() {
    let (code, out, _) = run(bcb().env("BCB_BACKEND", "float").arg("classify").arg(problem("persistence_cycle.json")));
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("scenario (iii): persistence, LR-cycle coexists with x^R for μ>0"));
    assert!(out.contains("s^LR = -0.3125 μ"), "{out}");
}

#[test]
fn unit_eigenvalue_is_a_degeneracy() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_problem(dir.path(), r#"{"dimension":1,"A_L":[[1]],"A_R":[[-0.5]],"b":[1]}"#);
    let (code, _, err) = run(bcb().arg("classify").arg(&path));
    assert_eq!(code, 2);
    assert!(err.contains("1 is an eigenvalue of A_L"), "{err}");
}

#[test]
fn parse_and_usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_problem(dir.path(), r#"{"dimension":2,"A_L":[[1,2],[3,4]],"A_R":[[0,0],[3,4]],"b":[1,1]}"#);
    let (code, _, err) = run(bcb().arg("classify").arg(&bad));
    assert_eq!(code, 1);
    assert!(err.contains("discontinuous"), "{err}");
    assert_eq!(run(bcb().arg("classify").arg(dir.path().join("missing.json"))).0, 1);
    assert_eq!(run(bcb().arg("frobnicate")).0, 1);
    assert_eq!(run(bcb().args(["verify", "--dims", "3..1"])).0, 1);
    assert_eq!(run(bcb().arg("--help")).0, 0);
}

#[test]
fn simulate_agrees_with_census() {
    let (code, out, _) = run(bcb().arg("simulate").arg(problem("persistence_cycle.json")).args(["--mu", "1"]));
    assert_eq!(code, 0);
    assert!(out.contains("PERIOD_2 at (-0.3125, 0.875); agrees with census"), "{out}");

    let (code, out, _) = run(bcb().arg("simulate").arg(problem("fold.json")).args(["--mu", "-1"]));
    assert_eq!(code, 0);
    assert!(out.contains("no attractor found; census empty: agree"), "{out}");
}

#[test]
fn simulate_with_zero_iterations_is_undecided() {
    let (code, out, _) = run(bcb().arg("simulate").arg(problem("persistence.json")).args(["--mu", "1", "--iters", "0"]));
    assert_eq!(code, 0);
    let seeds: Vec<&str> = out.lines().filter(|l| l.starts_with("seed")).collect();
    assert!(!seeds.is_empty());
    assert!(seeds.iter().all(|l| l.ends_with("UNDECIDED")), "{out}");
}

#[test]
fn simulate_accepts_explicit_seeds() {
    let (code, out, _) =
        run(bcb().arg("simulate").arg(problem("persistence.json")).args(["--mu", "-1", "--seeds", "0.5;-2"]));
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("seed")).count(), 2, "{out}");
}

fn csv_rows(out: &str) -> Vec<Vec<String>> {
    out.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_panel_c_has_cycle_only_for_positive_mu() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let svg = dir.path().join("c.svg");
    let (code, _, _) = run(bcb()
        .arg("sweep")
        .arg(problem("persistence_cycle.json"))
        .args(["--mu-min", "-1", "--mu-max", "1", "--steps", "41"])
        .arg("--output")
        .arg(&csv)
        .arg("--svg")
        .arg(&svg));
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next(), Some("mu,s_L,s_L_admissible,s_R,s_R_admissible,s_LR,s_RL,lr_admissible"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41);
    for row in &rows {
        let mu: f64 = row[0].parse().unwrap();
        if mu < 0.0 {
            assert_eq!(row[7], "false");
            assert!(row[5].is_empty() && row[6].is_empty());
        } else if mu > 0.0 {
            let (s_lr, s_rl): (f64, f64) = (row[5].parse().unwrap(), row[6].parse().unwrap());
            assert!((s_lr + 0.3125 * mu).abs() < 1e-12 && (s_rl - 0.875 * mu).abs() < 1e-12);
        }
    }
    let picture = fs::read_to_string(&svg).unwrap();
    assert!(picture.starts_with("<svg"));
    assert!(picture.contains("stroke-dasharray"));
}

#[test]
fn sweep_panel_a_has_one_fixed_point_per_side() {
    let (code, out, _) = run(bcb().arg("sweep").arg(problem("persistence.json")).args(["--steps", "21"]));
    assert_eq!(code, 0);
    for row in csv_rows(&out) {
        if row[0] != "0" {
            assert!((row[2] == "true") != (row[4] == "true"), "{row:?}");
            assert_eq!(row[7], "false");
        }
    }
}

#[test]
fn sweep_with_two_steps_has_two_rows() {
    let (code, out, _) = run(bcb().arg("sweep").arg(problem("fold.json")).args(["--steps", "2"]));
    assert_eq!(code, 0);
    assert_eq!(csv_rows(&out).len(), 2);
}

#[test]
fn verify_with_no_samples_is_empty_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(bcb().args(["verify", "--samples", "0"]).arg("--report-dir").arg(dir.path()));
    assert_eq!(code, 0);
    assert!(out.contains("total failures: 0"));
    let csv = fs::read_to_string(dir.path().join("verify_report.csv")).unwrap();
    assert!(csv.starts_with("section,property,tried,rejected,vacuous,passed,failed\n"));
    let counts = csv.lines().skip(1).flat_map(|l| l.split(',').skip(2).filter(|c| !c.is_empty()).collect::<Vec<_>>());
    assert!(counts.into_iter().all(|c| c == "0"), "{csv}");
}

#[test]
fn verify_small_run_passes_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for label in ["a", "b"] {
        let out_dir = dir.path().join(label);
        let (code, _, err) = run(bcb()
            .args(["verify", "--samples", "300", "--dims", "2..4", "--seed", "9", "--simulation-samples", "50"])
            .arg("--report-dir")
            .arg(&out_dir));
        assert_eq!(code, 0, "{err}");
        reports.push(fs::read(out_dir.join("verify_report.txt")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[cfg(feature = "fault-injection")]
#[test]
fn corrupted_cycle_formula_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) =
        run(bcb().args(["verify", "--samples", "200", "--simulation-samples", "20"]).arg("--report-dir").arg(dir.path()));
    assert_eq!(code, 3, "{err}");
}
