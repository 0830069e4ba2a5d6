use bcb::simulate::default_seeds;
use bcb::{detect_attractor, step, DetectOptions, Outcome, PwlMap};

fn panel(a_l: f64, a_r: f64) -> PwlMap<f64> {
    PwlMap::one_dimensional(a_l, a_r, 1.0)
}

#[test]
fn one_step_by_hand() {
    assert_eq!(step(&panel(0.4, -1.5), &[-0.3125], &1.0), vec![0.875]);
    assert_eq!(step(&panel(0.4, -1.5), &[0.0], &0.0), vec![0.0]);
}

#[test]
fn panel_c_settles_on_the_two_cycle() {
    let orbits = detect_attractor(&panel(0.4, -1.5), 1.0, &[vec![0.1]], DetectOptions::default());
    match &orbits[0].outcome {
        Outcome::Periodic(points) => {
            let mut s: Vec<f64> = points.iter().map(|p| p[0]).collect();
            s.sort_by(f64::total_cmp);
            assert!((s[0] + 0.3125).abs() < 1e-9 && (s[1] - 0.875).abs() < 1e-9, "{s:?}");
        }
        other => panic!("expected a two-cycle, got {other}"),
    }
}

#[test]
fn panel_a_contracts_to_the_fixed_point() {
    let orbits = detect_attractor(&panel(0.4, -0.4), 1.0, &[vec![0.0]], DetectOptions::default());
    match &orbits[0].outcome {
        Outcome::FixedPoint(x) => assert!((x[0] - 1.0 / 1.4).abs() < 1e-9),
        other => panic!("expected a fixed point, got {other}"),
    }
}

#[test]
fn panel_d_diverges_for_negative_mu() {
    let orbits = detect_attractor(&panel(2.0, -1.5), -1.0, &[vec![0.1], vec![-0.1]], DetectOptions::default());
    assert!(orbits.iter().all(|o| o.outcome == Outcome::Diverged));
}

#[test]
fn zero_iterations_decide_nothing() {
    let options = DetectOptions { max_iters: 0, ..DetectOptions::default() };
    let orbits = detect_attractor(&panel(0.4, -0.4), 1.0, &default_seeds(1), options);
    assert!(orbits.iter().all(|o| o.outcome == Outcome::Undecided));
}

#[test]
fn slow_spiral_is_not_mistaken_for_a_cycle() {
    // Eigenvalue -0.999: successive iterates alternate around the fixed point
    // long after every other iterate has stopped moving.
    let orbits = detect_attractor(&panel(-0.999, -0.999), 1.0, &[vec![0.5]], DetectOptions::default());
    match &orbits[0].outcome {
        Outcome::FixedPoint(x) => assert!((x[0] - 1.0 / 1.999).abs() < 1e-6),
        other => panic!("expected a fixed point, got {other}"),
    }
}

#[test]
fn results_do_not_depend_on_seed_order() {
    let map = PwlMap::one_dimensional(0.4, -1.5, 1.0);
    let seeds = default_seeds(1);
    let reversed: Vec<Vec<f64>> = seeds.iter().rev().cloned().collect();
    let a = detect_attractor(&map, 1.0, &seeds, DetectOptions::default());
    let mut b = detect_attractor(&map, 1.0, &reversed, DetectOptions::default());
    b.reverse();
    assert_eq!(a, b);
}
