use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use bcb::model::MuSide;
use bcb::simulate::{canonical_cycle, default_seeds, DetectOptions, Outcome};
use bcb::sweep::{self, to_csv, to_svg};
use bcb::verify::{
    verify_against_simulation, verify_coexistence, verify_coexistence_grid, verify_identities, DegeneracyPolicy,
    EntryDistribution, SampleSpec,
};
use bcb::{classify, detect_attractor, parse_problem, Backend, Classification, Error, PwlMap, Rational, Scalar, VerifyReport};
use clap::{Args, Parser, Subcommand};

/// Border-collision bifurcations of continuous piecewise-linear maps.
#[derive(Parser)]
#[command(name = "bcb", version, about)]
struct Cli {
    /// Arithmetic backend.
    #[arg(long, global = true, env = "BCB_BACKEND", default_value = "rational")]
    backend: Backend,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the scenario, eigenvalue counts, branches and census.
    Classify {
        file: PathBuf,
    },
    /// Iterate the map from a set of seeds and compare with the census.
    Simulate(SimulateArgs),
    /// Tabulate the branches over a range of mu as CSV, optionally as SVG.
    Sweep(SweepArgs),
    /// Run the randomized property checks and write report files.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    file: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    /// Seeds as `x1,x2;y1,y2;...`. Defaults to points along every axis.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    iters: usize,
    #[arg(long, default_value_t = 8)]
    period_cap: usize,
}

#[derive(Args)]
struct SweepArgs {
    file: PathBuf,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    mu_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mu_max: f64,
    #[arg(long, default_value_t = 41)]
    steps: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also draw the diagram as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Dimension range, `lo..hi` inclusive.
    #[arg(long, default_value = "1..5", value_parser = parse_dims)]
    dims: (usize, usize),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rational entries are p/q with |p| and q at most this cap.
    #[arg(long, default_value_t = 3)]
    entry_cap: i64,
    /// Draw normal entries with this standard deviation instead.
    #[arg(long)]
    std_dev: Option<f64>,
    /// Every k-th sample is a companion pair with prescribed spectra; 0 disables.
    #[arg(long, default_value_t = 8)]
    structured_every: usize,
    /// Redraw degenerate samples up to this many times instead of rejecting.
    #[arg(long)]
    resample: Option<usize>,
    /// Cap on the samples iterated by the simulation check.
    #[arg(long, default_value_t = 2_000)]
    simulation_samples: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    report_dir: PathBuf,
}

fn parse_dims(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..")
        .map(|(a, b)| (a, b.trim_start_matches('=')))
        .unwrap_or((text, text));
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad dimension range `{text}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad dimension range `{text}`"))?;
    if lo == 0 || lo > hi || hi > bcb::model::DEFAULT_MAX_DIMENSION {
        return Err(format!(
            "dimension range must satisfy 1 <= lo <= hi <= {}",
            bcb::model::DEFAULT_MAX_DIMENSION
        ));
    }
    Ok((lo, hi))
}

/// Failure classes, each with its own exit status.
enum Failure {
    Usage(anyhow::Error),
    Degenerate(Error),
    Property(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn from_library(e: Error) -> Failure {
    if e.is_degeneracy() {
        Failure::Degenerate(e)
    } else if matches!(e, Error::Inconsistent { .. }) {
        Failure::Property(e.to_string())
    } else {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.backend {
        Backend::Rational => run::<Rational>(cli.command, cli.backend),
        Backend::Float => run::<f64>(cli.command, cli.backend),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Degenerate(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Property(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn run<T: Scalar>(command: Command, backend: Backend) -> Result<(), Failure> {
    match command {
        Command::Classify { file } => {
            let c = classify(&load::<T>(&file)?).map_err(from_library)?;
            print!("{c}");
            Ok(())
        }
        Command::Simulate(args) => simulate::<T>(args),
        Command::Sweep(args) => sweep_cmd::<T>(args),
        Command::Verify(args) => verify(args, backend),
    }
}

fn load<T: Scalar>(path: &Path) -> anyhow::Result<PwlMap<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn parse_seeds(text: &str, n: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|seed| {
            let x = seed
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| anyhow!("bad seed coordinate `{v}`")))
                .collect::<anyhow::Result<Vec<f64>>>()?;
            if x.len() != n {
                bail!("seed `{seed}` has {} coordinates, the map has dimension {n}", x.len());
            }
            Ok(x)
        })
        .collect()
}

fn canonical(outcome: &Outcome) -> Outcome {
    match outcome {
        Outcome::Periodic(points) => Outcome::Periodic(canonical_cycle(points)),
        other => other.clone(),
    }
}

fn same_attractor(a: &Outcome, b: &Outcome) -> bool {
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 1e-6 * p.abs().max(q.abs()).max(1.0));
    match (a, b) {
        (Outcome::FixedPoint(x), Outcome::FixedPoint(y)) => close(x, y),
        (Outcome::Periodic(p), Outcome::Periodic(q)) => p.len() == q.len() && p.iter().zip(q).all(|(x, y)| close(x, y)),
        _ => false,
    }
}

fn census_match<T: Scalar>(c: &Classification<T>, side: MuSide, mu: f64, outcome: &Outcome) -> bool {
    let Some(object) = c.attractor(side) else { return false };
    let predicted: Vec<Vec<f64>> = c
        .branch(object)
        .points_at(&T::from_f64(mu).unwrap_or_else(T::one))
        .iter()
        .map(|p| p.iter().map(T::to_f64).collect())
        .collect();
    let expected = if predicted.len() == 1 {
        Outcome::FixedPoint(predicted[0].clone())
    } else {
        Outcome::Periodic(canonical_cycle(&predicted))
    };
    same_attractor(&expected, outcome)
}

fn simulate<T: Scalar>(args: SimulateArgs) -> Result<(), Failure> {
    let map = load::<T>(&args.file)?;
    let float_map = map.to_f64();
    let seeds = match &args.seeds {
        Some(text) => parse_seeds(text, map.dim())?,
        None => default_seeds(map.dim()),
    };
    let options = DetectOptions { period_cap: args.period_cap.max(1), max_iters: args.iters, ..DetectOptions::default() };
    let orbits = detect_attractor(&float_map, args.mu, &seeds, options);
    let mut distinct: Vec<Outcome> = Vec::new();
    for orbit in &orbits {
        let outcome = canonical(&orbit.outcome);
        let seed: Vec<String> = orbit.seed.iter().map(|v| v.to_string()).collect();
        println!("seed ({}): {outcome}", seed.join(", "));
        if outcome.period().is_some() && !distinct.iter().any(|d| same_attractor(d, &outcome)) {
            distinct.push(outcome);
        }
    }

    let classification = classify(&map);
    let side = MuSide::of(args.mu);
    let (c, side) = match (&classification, side) {
        (Ok(c), Some(side)) => (c, side),
        (Err(e), _) => {
            for d in &distinct {
                println!("{d}; no census ({e})");
            }
            if distinct.is_empty() {
                println!("no attractor found; no census ({e})");
            }
            return Ok(());
        }
        (Ok(_), None) => {
            println!("μ = 0: no census to compare with");
            return Ok(());
        }
    };
    let predicted = c.attractor(side);
    let mut disagreements = 0;
    for d in &distinct {
        if census_match(c, side, args.mu, d) {
            println!("{d}; agrees with census");
        } else {
            disagreements += 1;
            match predicted {
                Some(object) => println!("{d}; disagrees with census (predicted {object})"),
                None => println!("{d}; disagrees with census (no attracting object predicted)"),
            }
        }
    }
    if distinct.is_empty() {
        let census = c.census(side);
        match predicted {
            None if census.is_empty() => println!("no attractor found; census empty: agree"),
            None => println!("no attractor found; census has no attracting object: agree"),
            Some(object) if args.iters == 0 => println!("no attractor found after 0 iterations; census predicts {object}"),
            Some(object) => {
                disagreements += 1;
                println!("no attractor found; census predicts {object}: disagree");
            }
        }
    }
    if disagreements > 0 {
        return Err(Failure::Property(format!("{disagreements} simulation result(s) disagree with the census")));
    }
    Ok(())
}

fn sweep_cmd<T: Scalar>(args: SweepArgs) -> Result<(), Failure> {
    if args.steps == 0 {
        return Err(Failure::Usage(anyhow!("--steps must be at least 1")));
    }
    if !(args.mu_min.is_finite() && args.mu_max.is_finite()) || args.mu_min > args.mu_max {
        return Err(Failure::Usage(anyhow!("need finite --mu-min <= --mu-max")));
    }
    let c = classify(&load::<T>(&args.file)?).map_err(from_library)?;
    let rows = sweep::sweep(&c, args.mu_min, args.mu_max, args.steps);
    let csv = to_csv(&rows);
    match &args.output {
        Some(path) => fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        fs::write(path, to_svg(&rows)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn verify(args: VerifyArgs, backend: Backend) -> Result<(), Failure> {
    let entries = match args.std_dev {
        Some(s) if s.is_finite() && s > 0.0 => EntryDistribution::Normal { std_dev: s },
        Some(_) => return Err(Failure::Usage(anyhow!("--std-dev must be positive"))),
        None if args.entry_cap >= 1 => EntryDistribution::Rational { cap: args.entry_cap },
        None => return Err(Failure::Usage(anyhow!("--entry-cap must be at least 1"))),
    };
    let spec = SampleSpec {
        dims: args.dims.0..=args.dims.1,
        entries,
        samples: args.samples,
        seed: args.seed,
        structured_every: (args.structured_every > 0).then_some(args.structured_every),
        policy: args.resample.map_or(DegeneracyPolicy::Reject, |max_attempts| DegeneracyPolicy::Resample { max_attempts }),
        backend,
        threads: args.threads,
    };
    let simulation_spec = SampleSpec { samples: args.samples.min(args.simulation_samples), ..spec.clone() };
    let mut reports = vec![verify_coexistence(&spec)];
    if args.samples > 0 && args.dims.0 == 1 {
        reports.push(verify_coexistence_grid(backend, args.threads));
    }
    reports.push(verify_identities(&spec));
    reports.push(verify_against_simulation(&simulation_spec));
    let report = VerifyReport::combine(reports);

    fs::create_dir_all(&args.report_dir).with_context(|| format!("cannot create {}", args.report_dir.display()))?;
    let text = report.to_text();
    for (name, body) in [("verify_report.txt", &text), ("verify_report.csv", &report.to_csv())] {
        let path = args.report_dir.join(name);
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    print!("{text}");
    match report.failures() {
        0 => Ok(()),
        n => Err(Failure::Property(format!("{n} property failure(s); see verify_report.txt"))),
    }
}
