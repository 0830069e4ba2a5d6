//! Brute-force iteration of the map, used as an oracle for the closed-form
//! predictions. Nothing here touches determinants or eigenvalues.

use std::fmt;

use rayon::prelude::*;

use crate::error::Piece;
use crate::model::PwlMap;
use crate::scalar::Scalar;

/// One application of the map. Exactly on the switching manifold both pieces
/// give the same image.
pub fn step<T: Scalar>(map: &PwlMap<T>, x: &[T], mu: &T) -> Vec<T> {
    let s = &x[0];
    if s.is_negative() {
        map.half_map(Piece::Left, x, mu)
    } else if s.is_positive() {
        map.half_map(Piece::Right, x, mu)
    } else {
        let left = map.half_map(Piece::Left, x, mu);
        debug_assert!(left
            .iter()
            .zip(map.half_map(Piece::Right, x, mu))
            .all(|(a, b)| a.approx_eq(&b, 1e-12)));
        left
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectOptions {
    pub period_cap: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { period_cap: 8, max_iters: 100_000, tol: 1e-9 }
    }
}

/// Distance below which two points of a detected cycle are treated as the
/// same point.
const COLLAPSE_TOLERANCE: f64 = 1e-6;

/// Orbits escaping past this norm are declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    FixedPoint(Vec<f64>),
    /// Minimal period `k >= 2`; the points in orbit order.
    Periodic(Vec<Vec<f64>>),
    Diverged,
    Undecided,
}

impl Outcome {
    pub fn period(&self) -> Option<usize> {
        match self {
            Outcome::FixedPoint(_) => Some(1),
            Outcome::Periodic(points) => Some(points.len()),
            _ => None,
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Outcome::FixedPoint(x) => vec![x.clone()],
            Outcome::Periodic(points) => points.clone(),
            _ => Vec::new(),
        }
    }
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{}", round_for_display(*v))).collect();
    format!("({})", parts.join(", "))
}

fn round_for_display(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::FixedPoint(x) => write!(f, "FIXED_POINT at {}", fmt_point(x)),
            Outcome::Periodic(points) => {
                let firsts: Vec<f64> = points.iter().map(|p| p[0]).collect();
                write!(f, "PERIOD_{} at {}", points.len(), fmt_point(&firsts))
            }
            Outcome::Diverged => f.write_str("DIVERGED"),
            Outcome::Undecided => f.write_str("UNDECIDED"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub seed: Vec<f64>,
    pub mu: f64,
    pub max_iters: usize,
    /// The last `2 * period_cap` iterates, oldest first.
    pub tail: Vec<Vec<f64>>,
    pub outcome: Outcome,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = 1f64.max(norm(a)).max(norm(b));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Smallest `k <= cap` such that the last `k` iterates repeat the `k` before
/// them.
fn detect_period(tail: &[Vec<f64>], cap: usize, tol: f64) -> Option<usize> {
    let len = tail.len();
    (1..=cap).find(|&k| {
        2 * k <= len
            && close(&tail[len - 1], &tail[len - 1 - k], tol)
            && (0..k).all(|j| close(&tail[len - 1 - j], &tail[len - 1 - j - k], tol))
    })
}

/// Whether a detected cycle is within a loose tolerance of one with a
/// proper divisor as period.
fn collapses(points: &[Vec<f64>]) -> bool {
    let k = points.len();
    (1..k).filter(|d| k % d == 0).any(|d| {
        (0..k - d).all(|j| {
            let scale = 1.0 + norm(&points[j]);
            close(&points[j], &points[j + d], COLLAPSE_TOLERANCE * scale)
        })
    })
}

fn iterate(map: &PwlMap<f64>, seed: &[f64], mu: f64, options: &DetectOptions) -> Orbit {
    let window = 2 * options.period_cap.max(1);
    let mut tail: Vec<Vec<f64>> = Vec::with_capacity(window + 1);
    let mut x = seed.to_vec();
    let mut outcome = Outcome::Undecided;
    let mut pending = None;
    for _ in 0..options.max_iters {
        x = step(map, &x, &mu);
        if x.iter().any(|v| !v.is_finite()) || norm(&x) > DIVERGENCE_NORM {
            outcome = Outcome::Diverged;
            break;
        }
        if tail.len() == window {
            tail.remove(0);
        }
        tail.push(x.clone());
        if let Some(k) = detect_period(&tail, options.period_cap, options.tol) {
            let points = tail[tail.len() - k..].to_vec();
            let found = if k == 1 { Outcome::FixedPoint(points[0].clone()) } else { Outcome::Periodic(points) };
            // An orbit spiralling slowly into a shorter cycle can repeat with
            // period k before consecutive points agree. Keep going until the
            // shorter period shows up, falling back to k if it never does.
            if k > 1 && collapses(&tail[tail.len() - k..]) {
                pending = Some(found);
                continue;
            }
            outcome = found;
            break;
        }
    }
    if outcome == Outcome::Undecided {
        if let Some(found) = pending {
            outcome = found;
        }
    }
    Orbit { seed: seed.to_vec(), mu, max_iters: options.max_iters, tail, outcome }
}

/// Iterates from every seed and reports what each orbit settles on. Seeds
/// run in parallel; the result is in seed order.
pub fn detect_attractor(map: &PwlMap<f64>, mu: f64, seeds: &[Vec<f64>], options: DetectOptions) -> Vec<Orbit> {
    seeds.par_iter().map(|seed| iterate(map, seed, mu, &options)).collect()
}

/// Plus and minus each coordinate axis at scales 0.1, 1 and 10, plus the
/// origin and the diagonal points `+-0.1 (1, ..., 1)`.
pub fn default_seeds(n: usize) -> Vec<Vec<f64>> {
    let mut seeds = vec![vec![0.0; n]];
    for scale in [0.1, 1.0, 10.0] {
        for axis in 0..n {
            for sign in [1.0, -1.0] {
                let mut x = vec![0.0; n];
                x[axis] = sign * scale;
                seeds.push(x);
            }
        }
    }
    seeds.push(vec![0.1; n]);
    seeds.push(vec![-0.1; n]);
    seeds
}

/// Rotates a periodic orbit so it starts at its point with the smallest
/// first component, which makes orbits comparable.
pub fn canonical_cycle(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let start = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[0].total_cmp(&b.1[0]))
        .map_or(0, |(i, _)| i);
    points[start..].iter().chain(&points[..start]).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_examples() {
        let map = PwlMap::one_dimensional(0.4, -1.5, 1.0);
        assert_eq!(step(&map, &[-0.3125], &1.0), vec![0.875]);
        assert_eq!(step(&map, &[0.0], &0.0), vec![0.0]);
        let x = [0.0, 2.0];
        let plane = PwlMap::from_pieces(
            crate::Matrix::new(2, vec![0.5, 1.0, -1.0, 0.2]),
            crate::Matrix::new(2, vec![-3.0, 1.0, 4.0, 0.2]),
            vec![1.0, 0.5],
        )
        .unwrap();
        assert_eq!(plane.half_map(Piece::Left, &x, &1.0), plane.half_map(Piece::Right, &x, &1.0));
    }

    #[test]
    fn panel_c_period_two() {
        let map = PwlMap::one_dimensional(0.4, -1.5, 1.0);
        let orbits = detect_attractor(&map, 1.0, &[vec![0.1]], DetectOptions::default());
        match &orbits[0].outcome {
            Outcome::Periodic(points) => {
                let c = canonical_cycle(points);
                assert!((c[0][0] + 0.3125).abs() < 1e-8);
                assert!((c[1][0] - 0.875).abs() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn panel_a_fixed_point() {
        let map = PwlMap::one_dimensional(0.4, -0.4, 1.0);
        let orbits = detect_attractor(&map, 1.0, &[vec![0.0]], DetectOptions::default());
        match &orbits[0].outcome {
            Outcome::FixedPoint(x) => assert!((x[0] - 1.0 / 1.4).abs() < 1e-8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn panel_d_diverges_for_negative_mu() {
        let map = PwlMap::one_dimensional(2.0, -1.5, 1.0);
        for orbit in detect_attractor(&map, -1.0, &[vec![0.1], vec![-0.1]], DetectOptions::default()) {
            assert_eq!(orbit.outcome, Outcome::Diverged);
        }
    }

    #[test]
    fn zero_iterations_are_undecided() {
        let map = PwlMap::one_dimensional(0.4, -0.4, 1.0);
        let options = DetectOptions { max_iters: 0, ..DetectOptions::default() };
        assert!(detect_attractor(&map, 1.0, &default_seeds(1), options)
            .iter()
            .all(|o| o.outcome == Outcome::Undecided));
    }

    #[test]
    fn seeds_cover_both_sides() {
        let seeds = default_seeds(3);
        assert!(seeds.len() >= 8);
        assert!(seeds.iter().any(|s| s[0] > 0.0) && seeds.iter().any(|s| s[0] < 0.0));
    }

    #[test]
    fn minimal_period_is_reported() {
        let tail = vec![vec![1.0], vec![2.0], vec![1.0], vec![2.0], vec![1.0], vec![2.0], vec![1.0], vec![2.0]];
        assert_eq!(detect_period(&tail, 8, 1e-9), Some(2));
    }
}
