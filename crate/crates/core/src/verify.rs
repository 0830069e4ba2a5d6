//! Randomized and structured searches that treat the classification results
//! and the algebraic identities behind them as falsifiable properties.
//!
//! Each sample draws from its own random stream, selected by the sample
//! index, so the report does not depend on how many threads evaluate it.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::classify::{self, Classification, Scenario};
use crate::error::Error;
use crate::matrix::{det_lemma_check, dot, unit_vector, Matrix};
use crate::model::{MuSide, Object, PwlMap};
use crate::poly::Poly;
use crate::scalar::{Backend, Rational, Scalar, Sign};
use crate::simulate::{canonical_cycle, default_seeds, detect_attractor, DetectOptions, Outcome};
use crate::spectral::{self, SpectralCounts, Stability};

/// Witnesses kept per property; further failures are only counted.
pub const MAX_WITNESSES: usize = 20;

/// Coordinate tolerance when matching simulated orbits to closed forms.
pub const SIMULATION_TOLERANCE: f64 = 1e-6;

/// Relative displacement of the seeds placed next to a predicted attractor.
const NUDGE: f64 = 1e-4;

/// Relative tolerance for float-backend identity checks.
pub const FLOAT_IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntryDistribution {
    /// `p/q` with `p` uniform in `-cap..=cap` and `q` uniform in `1..=cap`.
    Rational { cap: i64 },
    /// Normal with mean zero.
    Normal { std_dev: f64 },
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryDistribution::Rational { cap } => write!(f, "rational p/q, |p| <= {cap}, 1 <= q <= {cap}"),
            EntryDistribution::Normal { std_dev } => write!(f, "normal, std dev {std_dev}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyPolicy {
    /// Count degenerate samples and move on.
    Reject,
    /// Redraw from the same stream up to `max_attempts` times before
    /// counting the sample as rejected.
    Resample { max_attempts: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub dims: RangeInclusive<usize>,
    pub entries: EntryDistribution,
    pub samples: usize,
    pub seed: u64,
    /// Every `k`-th sample is a companion-matrix pair with prescribed real
    /// spectra straddling `+-1`.
    pub structured_every: Option<usize>,
    pub policy: DegeneracyPolicy,
    pub backend: Backend,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub threads: Option<usize>,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            dims: 1..=5,
            entries: EntryDistribution::Rational { cap: 3 },
            samples: 1000,
            seed: 0,
            structured_every: Some(8),
            policy: DegeneracyPolicy::Reject,
            backend: Backend::Rational,
            threads: None,
        }
    }
}

impl fmt::Display for SampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "samples {}, dims {}..{}, entries {}, seed {}, backend {}",
            self.samples,
            self.dims.start(),
            self.dims.end(),
            self.entries,
            self.seed,
            self.backend
        )?;
        if let Some(k) = self.structured_every {
            write!(f, ", structured every {k}")?;
        }
        match self.policy {
            DegeneracyPolicy::Reject => write!(f, ", degenerate rejected"),
            DegeneracyPolicy::Resample { max_attempts } => write!(f, ", degenerate resampled up to {max_attempts} times"),
        }
    }
}

/// Counts for one property.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertyTally {
    pub name: &'static str,
    /// Samples drawn, including rejected ones.
    pub tried: u64,
    pub rejected: u64,
    /// Samples where the property's premise did not apply.
    pub vacuous: u64,
    pub passed: u64,
    pub failed: u64,
    pub witnesses: Vec<String>,
}

/// Results of one verifier run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: &'static str,
    pub description: String,
    pub properties: Vec<PropertyTally>,
    /// Classified samples per scenario (i) to (iv), when the run classifies.
    pub histogram: Option<[u64; 4]>,
    /// Samples with the parities of the impossible fifth scenario.
    pub scenario_v: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub sections: Vec<Section>,
}

impl VerifyReport {
    pub fn combine(reports: impl IntoIterator<Item = VerifyReport>) -> VerifyReport {
        VerifyReport { sections: reports.into_iter().flat_map(|r| r.sections).collect() }
    }

    pub fn failures(&self) -> u64 {
        self.sections
            .iter()
            .map(|s| s.scenario_v + s.properties.iter().map(|p| p.failed).sum::<u64>())
            .sum()
    }

    pub fn property(&self, name: &str) -> Option<&PropertyTally> {
        self.sections.iter().flat_map(|s| &s.properties).find(|p| p.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let _ = writeln!(out, "== {} ==", s.name);
            let _ = writeln!(out, "{}", s.description);
            let _ = writeln!(
                out,
                "{:<26} {:>9} {:>9} {:>9} {:>9} {:>7}",
                "property", "tried", "rejected", "vacuous", "passed", "failed"
            );
            for p in &s.properties {
                let _ = writeln!(
                    out,
                    "{:<26} {:>9} {:>9} {:>9} {:>9} {:>7}",
                    p.name, p.tried, p.rejected, p.vacuous, p.passed, p.failed
                );
            }
            if let Some(h) = s.histogram {
                let _ = writeln!(
                    out,
                    "scenarios: (i) {}  (ii) {}  (iii) {}  (iv) {}  (v) {}",
                    h[0], h[1], h[2], h[3], s.scenario_v
                );
            }
            for p in s.properties.iter().filter(|p| !p.witnesses.is_empty()) {
                for w in &p.witnesses {
                    let _ = writeln!(out, "FAIL {}: {}", p.name, w.replace('\n', "\n    "));
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "total failures: {}", self.failures());
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,property,tried,rejected,vacuous,passed,failed\n");
        for s in &self.sections {
            for p in &s.properties {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.name, p.name, p.tried, p.rejected, p.vacuous, p.passed, p.failed
                );
            }
            if let Some(h) = s.histogram {
                for (scenario, count) in Scenario::ALL.iter().zip(h) {
                    let _ = writeln!(out, "{},scenario_{},{count},,,,", s.name, scenario.roman());
                }
                let _ = writeln!(out, "{},scenario_v,{},,,,", s.name, s.scenario_v);
            }
        }
        out
    }
}

/// Outcome of one property on one sample.
#[derive(Clone, Debug, PartialEq)]
enum Check {
    Pass,
    Vacuous,
    Fail(String),
}

impl Check {
    fn from_bool(ok: bool, detail: impl FnOnce() -> String) -> Check {
        if ok {
            Check::Pass
        } else {
            Check::Fail(detail())
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Evaluation {
    rejected: bool,
    checks: Vec<Check>,
    scenario: Option<Scenario>,
    scenario_v: bool,
}

impl Evaluation {
    fn rejected() -> Self {
        Evaluation { rejected: true, ..Evaluation::default() }
    }
}

fn draw_entry(rng: &mut ChaCha8Rng, entries: EntryDistribution) -> Rational {
    match entries {
        EntryDistribution::Rational { cap } => {
            let cap = cap.max(1);
            Rational::from_ratio(rng.gen_range(-cap..=cap), rng.gen_range(1..=cap))
        }
        EntryDistribution::Normal { std_dev } => {
            let normal = Normal::new(0.0, std_dev).expect("standard deviation must be finite and positive");
            Rational::from_f64(normal.sample(rng)).unwrap_or_else(|| Rational::from_i64(0))
        }
    }
}

/// Real eigenvalues used for structured samples; none of them is `+-1`.
const SPECTRUM_POOL: [(i64, i64); 10] =
    [(-3, 1), (-2, 1), (-3, 2), (-1, 2), (-1, 5), (1, 5), (1, 2), (3, 2), (2, 1), (3, 1)];

/// The companion matrix with first column `c` and ones on the
/// superdiagonal; its characteristic polynomial is
/// `l^n - c_0 l^(n-1) - ... - c_(n-1)`.
fn first_column_companion(roots: &[Rational]) -> Matrix<Rational> {
    let n = roots.len();
    let p = Poly::from_roots(roots);
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        m.set(i, 0, -p.coeffs()[n - 1 - i].clone());
        if i + 1 < n {
            m.set(i, i + 1, Rational::from_i64(1));
        }
    }
    m
}

fn draw_map(spec: &SampleSpec, index: usize, rng: &mut ChaCha8Rng) -> PwlMap<Rational> {
    let n = rng.gen_range(spec.dims.clone());
    let b: Vec<Rational> = (0..n).map(|_| draw_entry(rng, spec.entries)).collect();
    let structured = spec.structured_every.is_some_and(|k| k > 0 && index % k == 0);
    if structured {
        let mut pick = || {
            let (p, q) = SPECTRUM_POOL[rng.gen_range(0..SPECTRUM_POOL.len())];
            Rational::from_ratio(p, q)
        };
        let left_roots: Vec<Rational> = (0..n).map(|_| pick()).collect();
        let right_roots: Vec<Rational> = (0..n).map(|_| pick()).collect();
        let left = first_column_companion(&left_roots);
        let right = first_column_companion(&right_roots);
        PwlMap::from_pieces(left, right, b).expect("companion pieces differ only in the first column")
    } else {
        let left = Matrix::new(n, (0..n * n).map(|_| draw_entry(rng, spec.entries)).collect());
        let xi = (0..n).map(|_| draw_entry(rng, spec.entries)).collect();
        PwlMap::with_max_dimension(left, xi, b, n).expect("dimensions agree")
    }
}

/// The sample stream: stream `index` of a generator seeded by `seed`.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The first map drawn for sample `index`. Resampling, when enabled, keeps
/// drawing from the same stream.
pub fn sample(spec: &SampleSpec, index: usize) -> PwlMap<Rational> {
    draw_map(spec, index, &mut sample_rng(spec.seed, index))
}

fn run(
    name: &'static str,
    properties: &'static [&'static str],
    classifies: bool,
    spec: &SampleSpec,
    count: usize,
    draw: &(dyn Fn(usize, &mut ChaCha8Rng) -> PwlMap<Rational> + Sync),
    eval: &(dyn Fn(&PwlMap<Rational>) -> Evaluation + Sync),
) -> VerifyReport {
    let one = |index: usize| {
        let mut rng = sample_rng(spec.seed, index);
        let attempts = match spec.policy {
            DegeneracyPolicy::Reject => 1,
            DegeneracyPolicy::Resample { max_attempts } => max_attempts.max(1),
        };
        let mut ev = Evaluation::rejected();
        for _ in 0..attempts {
            ev = eval(&draw(index, &mut rng));
            if !ev.rejected {
                break;
            }
        }
        ev
    };
    let evaluate = || (0..count).into_par_iter().map(one).collect::<Vec<_>>();
    let evaluations = match spec.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map(|pool| pool.install(evaluate))
            .unwrap_or_else(|_| evaluate()),
        None => evaluate(),
    };

    let mut tallies: Vec<PropertyTally> =
        properties.iter().map(|&name| PropertyTally { name, ..PropertyTally::default() }).collect();
    let mut histogram = [0u64; 4];
    let mut scenario_v = 0;
    for ev in evaluations {
        for t in tallies.iter_mut() {
            t.tried += 1;
        }
        if ev.rejected {
            for t in tallies.iter_mut() {
                t.rejected += 1;
            }
            continue;
        }
        if let Some(s) = ev.scenario {
            histogram[s.index()] += 1;
        }
        scenario_v += u64::from(ev.scenario_v);
        for (t, check) in tallies.iter_mut().zip(ev.checks) {
            match check {
                Check::Pass => t.passed += 1,
                Check::Vacuous => t.vacuous += 1,
                Check::Fail(w) => {
                    t.failed += 1;
                    if t.witnesses.len() < MAX_WITNESSES {
                        t.witnesses.push(w);
                    }
                }
            }
        }
    }
    VerifyReport {
        sections: vec![Section {
            name,
            description: spec.to_string(),
            properties: tallies,
            histogram: classifies.then_some(histogram),
            scenario_v,
        }],
    }
}

fn degenerate<T: Scalar>(map: &PwlMap<T>, counts: &SpectralCounts) -> bool {
    !classify::violated_hypotheses(map, counts).is_empty()
}

fn witness<T: Scalar>(map: &PwlMap<T>, detail: impl fmt::Display) -> String {
    format!("{detail}; map {}", map.witness())
}

const COEXISTENCE_PROPERTIES: &[&str] = &["cycle_sum_parity", "classifier_consistent", "single_attractor"];

fn coexistence_eval<T: Scalar>(map: &PwlMap<T>) -> Evaluation {
    let counts = spectral::counts(map.left(), map.right());
    if degenerate(map, &counts) {
        return Evaluation::rejected();
    }
    let both_odd = counts.plus_sum() % 2 == 1 && counts.minus_sum() % 2 == 1;
    let scenario_v = both_odd && counts.cycle_sum() % 2 == 0;
    let parity = if !both_odd {
        Check::Vacuous
    } else {
        Check::from_bool(!scenario_v, || witness(map, format!("odd plus and minus sums but even cycle sum\n{counts}")))
    };
    let (scenario, consistent, single) = match classify::classify_with(map, counts) {
        Ok(c) => {
            let single = MuSide::BOTH.iter().all(|&side| {
                c.census(side).iter().filter(|e| e.stability == Stability::Yes).count() <= 1
            });
            let single = Check::from_bool(single, || witness(map, format!("census {:?} / {:?}", c.census_negative, c.census_positive)));
            (Some(c.scenario), Check::Pass, single)
        }
        Err(e) if e.is_degeneracy() => return Evaluation::rejected(),
        Err(Error::Inconsistent { check: "single attractor", witness }) => {
            (None, Check::Pass, Check::Fail(witness))
        }
        Err(e) => (None, Check::Fail(e.to_string()), Check::Vacuous),
    };
    Evaluation { rejected: false, checks: vec![parity, consistent, single], scenario, scenario_v }
}

fn dispatch<R>(backend: Backend, map: &PwlMap<Rational>, f: impl FnOnce(&dyn AnyMap) -> R) -> R {
    match backend {
        Backend::Rational => f(map),
        Backend::Float => f(&map.to_f64()),
    }
}

/// Object-safe bridge so one closure can serve both backends.
trait AnyMap {
    fn coexistence(&self) -> Evaluation;
    fn identities(&self, exact: &PwlMap<Rational>) -> Evaluation;
    fn simulation(&self) -> Evaluation;
}

impl<T: Scalar> AnyMap for PwlMap<T> {
    fn coexistence(&self) -> Evaluation {
        coexistence_eval(self)
    }

    fn identities(&self, exact: &PwlMap<Rational>) -> Evaluation {
        identities_eval(self, exact)
    }

    fn simulation(&self) -> Evaluation {
        simulation_eval(self)
    }
}

/// Checks that whenever both the plus and the minus sums are odd, the
/// cycle sum is odd too, that the classifier's internal cross-checks hold,
/// and that no census holds two attractors.
pub fn verify_coexistence(spec: &SampleSpec) -> VerifyReport {
    let backend = spec.backend;
    run(
        "coexistence",
        COEXISTENCE_PROPERTIES,
        true,
        spec,
        spec.samples,
        &|index, rng| draw_map(spec, index, rng),
        &|map| dispatch(backend, map, |m| m.coexistence()),
    )
}

/// The one-dimensional maps `(a_L, a_R)` on the grid `{-3, -2.9, ..., 3}^2`
/// with `b = 1`.
pub fn grid_1d() -> Vec<PwlMap<Rational>> {
    let values: Vec<Rational> = (-30..=30).map(|k| Rational::from_ratio(k, 10)).collect();
    values
        .iter()
        .flat_map(|a| values.iter().map(move |r| PwlMap::one_dimensional(a.clone(), r.clone(), Rational::from_i64(1))))
        .collect()
}

/// [`verify_coexistence`] over the exhaustive one-dimensional grid.
pub fn verify_coexistence_grid(backend: Backend, threads: Option<usize>) -> VerifyReport {
    let maps = grid_1d();
    let spec = SampleSpec {
        dims: 1..=1,
        samples: maps.len(),
        structured_every: None,
        backend,
        threads,
        ..SampleSpec::default()
    };
    let mut report = run(
        "coexistence_grid",
        COEXISTENCE_PROPERTIES,
        true,
        &spec,
        maps.len(),
        &|index, _| maps[index].clone(),
        &|map| dispatch(backend, map, |m| m.coexistence()),
    );
    report.sections[0].description = format!("1-D grid a_L, a_R in {{-3, -2.9, ..., 3}}, b = 1, backend {backend}");
    report
}

const IDENTITY_PROPERTIES: &[&str] = &[
    "determinant_lemma",
    "adjugate_first_row",
    "factorization",
    "cross_sign_plus",
    "cross_sign_minus",
    "determinant_parities",
    "squared_parity",
    "fixed_point_signs",
    "cycle_signs",
    "majorization",
    "float_matches_exact",
];

fn identities_eval<T: Scalar>(map: &PwlMap<T>, exact: &PwlMap<Rational>) -> Evaluation {
    let counts = spectral::counts(map.left(), map.right());
    if degenerate(map, &counts) {
        return Evaluation::rejected();
    }
    let n = map.dim();
    let tol = FLOAT_IDENTITY_TOLERANCE;
    let id = Matrix::<T>::identity(n);
    let (l, r) = (map.left(), map.right());
    let xi = map.xi();
    let e1 = unit_vector::<T>(n, 0);
    let rl = r * l;
    let i_minus_rl = &id - &rl;
    let i_minus_l = &id - l;
    let i_minus_r = &id - r;
    let i_plus_l = &id + l;
    let i_plus_r = &id + r;
    let fail = |what: String| witness(map, what);

    // Determinant lemma on the two rank-one updates used by the theory and
    // on a pair built from the data itself.
    let lemma = det_lemma_check(l, xi, &e1)
        && det_lemma_check(&i_minus_rl, xi, &e1)
        && det_lemma_check(&i_minus_l, map.b(), map.rho());
    let lemma = Check::from_bool(lemma, || fail("det(A + p q^T) != det A + q^T adj(A) p".into()));

    let row_l = i_minus_l.adjugate().row(0).to_vec();
    let row_r = i_minus_r.adjugate().row(0).to_vec();
    let rows_equal = row_l.iter().zip(&row_r).all(|(a, b)| a.approx_eq(b, tol));
    let adj_row = Check::from_bool(rows_equal, || fail(format!("first rows differ: {row_l:?} vs {row_r:?}")));

    let lhs = &i_plus_r * &i_minus_l;
    let rhs = &i_minus_rl + &Matrix::<T>::zeros(n).rank_one_update(xi, &e1);
    let factor = Check::from_bool(lhs.approx_eq(&rhs, tol), || fail("(I + A_R)(I - A_L) != I - A_R A_L + xi e1^T".into()));

    let d = i_minus_rl.det();
    let d_scale = i_minus_rl.det_scale();
    let adj_xi = dot(i_minus_rl.adjugate().row(0), xi);
    let sign = |v: T, scale: f64| v.sign_in_band(scale);
    let cross = |parity_exp: usize, value: T| {
        let s = sign(value, d_scale);
        if s.is_zero() {
            Check::Vacuous
        } else {
            Check::from_bool(s == Sign::parity(parity_exp), || {
                fail(format!("sign {s} but parity exponent {parity_exp}\n{counts}"))
            })
        }
    };
    let cross_plus = cross(counts.sigma_l_plus + counts.sigma_r_minus, d.clone() + adj_xi.clone());
    let cross_minus = cross(counts.sigma_l_minus + counts.sigma_r_plus, d.clone() - adj_xi.clone());

    let det_sign = |m: &Matrix<T>| m.det().sign_in_band(m.det_scale());
    let parity_pairs = [
        (det_sign(&i_minus_l), counts.sigma_l_plus, "det(I - A_L)"),
        (det_sign(&i_minus_r), counts.sigma_r_plus, "det(I - A_R)"),
        (det_sign(&i_plus_l), counts.sigma_l_minus, "det(I + A_L)"),
        (det_sign(&i_plus_r), counts.sigma_r_minus, "det(I + A_R)"),
        (d.sign_in_band(d_scale), counts.sigma_lr_plus, "det(I - A_R A_L)"),
        (det_sign(&(&id - &(l * l))), counts.sigma_ll_plus, "det(I - A_L^2)"),
    ];
    let parities = match parity_pairs.iter().find(|(s, e, _)| !s.is_zero() && *s != Sign::parity(*e)) {
        _ if parity_pairs.iter().any(|(s, _, _)| s.is_zero()) => Check::Vacuous,
        None => Check::Pass,
        Some((s, e, name)) => Check::Fail(fail(format!("sgn {name} = {s} but count {e}"))),
    };
    let squared = Check::from_bool(
        Sign::parity(counts.sigma_ll_plus) == Sign::parity(counts.sigma_l_plus + counts.sigma_l_minus),
        || fail(format!("sigma_LL+ parity differs from sigma_L+ + sigma_L-\n{counts}")),
    );

    let rho_b_sign = map.rho_b_sign();
    let fixed_signs = match crate::model::fixed_points(map) {
        Ok((fl, fr)) => Check::from_bool(
            fl.signs[0] == Sign::parity(counts.sigma_l_plus) * rho_b_sign
                && fr.signs[0] == Sign::parity(counts.sigma_r_plus) * rho_b_sign,
            || fail("fixed-point sign formula".into()),
        ),
        Err(e) if e.is_degeneracy() => Check::Vacuous,
        Err(e) => Check::Fail(e.to_string()),
    };
    let cycle_signs = match crate::model::lr_cycle(map) {
        Ok(c) => Check::from_bool(
            c.signs[0] == Sign::parity(counts.sigma_r_minus + counts.sigma_lr_plus) * rho_b_sign
                && c.signs[1] == Sign::parity(counts.sigma_l_minus + counts.sigma_lr_plus) * rho_b_sign,
            || fail(format!("cycle sign formula: signs {:?}\n{counts}", c.signs)),
        ),
        Err(e) if e.is_degeneracy() => Check::Vacuous,
        Err(e) => Check::Fail(e.to_string()),
    };

    let equal_cross = (counts.sigma_l_plus + counts.sigma_r_minus) % 2 == (counts.sigma_l_minus + counts.sigma_r_plus) % 2;
    let majorization = if !equal_cross {
        Check::Vacuous
    } else {
        Check::from_bool(d.abs() > adj_xi.abs(), || fail(format!("|det| = {d} <= |e1^T adj xi| = {adj_xi}")))
    };

    let float_matches = if T::is_exact() {
        Check::Vacuous
    } else {
        float_agreement(map, exact)
    };

    Evaluation {
        rejected: false,
        checks: vec![
            lemma,
            adj_row,
            factor,
            cross_plus,
            cross_minus,
            parities,
            squared,
            fixed_signs,
            cycle_signs,
            majorization,
            float_matches,
        ],
        scenario: None,
        scenario_v: false,
    }
}

fn determinant_factors<T: Scalar>(m: &PwlMap<T>) -> Vec<Matrix<T>> {
    let id = Matrix::identity(m.dim());
    let (l, r) = (m.left(), m.right());
    vec![&id - l, &id - r, &id + l, &id + r, &id - &(r * l), &id - &(l * l)]
}

/// Float determinants that lie outside the zero band agree with the exact
/// ones to [`FLOAT_IDENTITY_TOLERANCE`] relative.
fn float_agreement<T: Scalar>(map: &PwlMap<T>, exact: &PwlMap<Rational>) -> Check {
    let floats = determinant_factors(map);
    let exacts = determinant_factors(exact);
    let mut applied = false;
    for (f, e) in floats.iter().zip(&exacts) {
        let fd = f.det().to_f64();
        if fd.abs() <= crate::scalar::ZERO_BAND * f.det_scale() {
            continue;
        }
        applied = true;
        let ed = Scalar::to_f64(&e.det());
        if (fd - ed).abs() > FLOAT_IDENTITY_TOLERANCE * ed.abs().max(1.0) {
            return Check::Fail(witness(map, format!("float determinant {fd} vs exact {ed}")));
        }
    }
    if applied {
        Check::Pass
    } else {
        Check::Vacuous
    }
}

/// Checks the determinant lemma, the shared first adjugate row, the
/// factorization `(I + A_R)(I - A_L) = I - A_R A_L + xi e1^T`, both cross
/// sign formulas, every determinant-sign parity, the closed-form sign
/// formulas and the majorization step of the coexistence argument.
pub fn verify_identities(spec: &SampleSpec) -> VerifyReport {
    let backend = spec.backend;
    run(
        "identities",
        IDENTITY_PROPERTIES,
        false,
        spec,
        spec.samples,
        &|index, rng| draw_map(spec, index, rng),
        &|map| dispatch(backend, map, |m| m.identities(map)),
    )
}

const SIMULATION_PROPERTIES: &[&str] = &[
    "attractor_found",
    "no_spurious_cycle",
    "fixed_point_closed_form",
    "cycle_closed_form",
];

fn close(a: &[f64], b: &[f64]) -> bool {
    let scale = a.iter().chain(b).fold(1f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SIMULATION_TOLERANCE * scale)
}

fn to_f64_points<T: Scalar>(points: Vec<Vec<T>>) -> Vec<Vec<f64>> {
    points.into_iter().map(|p| p.iter().map(T::to_f64).collect()).collect()
}

fn found<T: Scalar>(c: &Classification<T>, object: Object, side: MuSide, outcome: &Outcome) -> bool {
    let predicted = to_f64_points(c.branch(object).points_at(&side.unit()));
    match (object, outcome) {
        (Object::LrCycle, Outcome::Periodic(points)) if points.len() == 2 => {
            canonical_cycle(points).iter().zip(&canonical_cycle(&predicted)).all(|(a, b)| close(a, b))
        }
        (Object::FixedLeft | Object::FixedRight, Outcome::FixedPoint(x)) => close(x, &predicted[0]),
        _ => false,
    }
}

/// Points displaced from each of `points` by a small step along every axis.
/// Basins can be too thin for the generic seeds to land in; an orbit from a
/// nudged point still has to converge on its own for the check to pass.
fn nudged(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for p in points {
        let step = NUDGE * p.iter().fold(1f64, |m, v| m.max(v.abs()));
        for axis in 0..p.len() {
            for sign in [1.0, -1.0] {
                let mut q = p.clone();
                q[axis] += sign * step;
                out.push(q);
            }
        }
    }
    out
}

fn simulation_eval<T: Scalar>(map: &PwlMap<T>) -> Evaluation {
    let c = match classify::classify(map) {
        Ok(c) => c,
        Err(_) => return Evaluation::rejected(),
    };
    let float_map = map.to_f64();
    let mut attractor = Check::Vacuous;
    let mut spurious = Check::Vacuous;
    let mut fixed_ok = Check::Vacuous;
    let mut cycle_ok = Check::Vacuous;
    let merge = |slot: &mut Check, next: Check| {
        if !matches!(slot, Check::Fail(_)) && next != Check::Vacuous {
            *slot = next;
        }
    };
    for side in MuSide::BOTH {
        let mu = side.unit::<f64>();
        let mut seeds = default_seeds(map.dim());
        if let Some(object) = c.attractor(side) {
            seeds.extend(nudged(&to_f64_points(c.branch(object).points_at(&side.unit()))));
        }
        let orbits = detect_attractor(&float_map, mu, &seeds, DetectOptions::default());
        if let Some(object) = c.attractor(side) {
            let hit = orbits.iter().any(|o| found(&c, object, side, &o.outcome));
            merge(
                &mut attractor,
                Check::from_bool(hit, || {
                    let seen: Vec<String> = orbits.iter().map(|o| o.outcome.to_string()).collect();
                    witness(map, format!("{object} attracts for {side} but orbits gave [{}]", seen.join("; ")))
                }),
            );
        }
        if !c.cycle.is_admissible_on(side) {
            let period_two = orbits.iter().find(|o| o.outcome.period() == Some(2));
            merge(
                &mut spurious,
                Check::from_bool(period_two.is_none(), || {
                    witness(map, format!("no LR-cycle for {side} but saw {}", period_two.unwrap().outcome))
                }),
            );
        }
        for o in &orbits {
            match &o.outcome {
                Outcome::FixedPoint(x) if x[0] != 0.0 => {
                    let object = if x[0] < 0.0 { Object::FixedLeft } else { Object::FixedRight };
                    let ok = c.branch(object).is_admissible_on(side) && found(&c, object, side, &o.outcome);
                    merge(&mut fixed_ok, Check::from_bool(ok, || witness(map, format!("{side}: {}", o.outcome))));
                }
                Outcome::Periodic(points) if points.len() == 2 && (points[0][0] < 0.0) != (points[1][0] < 0.0) => {
                    let ok = c.cycle.is_admissible_on(side) && found(&c, Object::LrCycle, side, &o.outcome);
                    merge(&mut cycle_ok, Check::from_bool(ok, || witness(map, format!("{side}: {}", o.outcome))));
                }
                _ => {}
            }
        }
    }
    Evaluation {
        rejected: false,
        checks: vec![attractor, spurious, fixed_ok, cycle_ok],
        scenario: Some(c.scenario),
        scenario_v: false,
    }
}

/// Iterates every classified sample on both sides of `mu` and compares what
/// the orbits settle on with the census.
pub fn verify_against_simulation(spec: &SampleSpec) -> VerifyReport {
    let backend = spec.backend;
    run(
        "simulation",
        SIMULATION_PROPERTIES,
        true,
        spec,
        spec.samples,
        &|index, rng| draw_map(spec, index, rng),
        &|map| dispatch(backend, map, |m| m.simulation()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(samples: usize) -> SampleSpec {
        SampleSpec { samples, dims: 1..=3, seed: 7, ..SampleSpec::default() }
    }

    #[test]
    fn companion_spectrum() {
        let roots = [Rational::from_ratio(3, 2), Rational::from_ratio(-2, 1), Rational::from_ratio(1, 5)];
        let m = first_column_companion(&roots);
        for r in &roots {
            assert_eq!((&Matrix::scalar(3, r.clone()) - &m).det(), Rational::from_i64(0));
        }
    }

    #[test]
    fn streams_do_not_depend_on_order() {
        let spec = small(10);
        let forward: Vec<_> = (0..10).map(|i| draw_map(&spec, i, &mut sample_rng(spec.seed, i))).collect();
        let backward: Vec<_> = (0..10).rev().map(|i| draw_map(&spec, i, &mut sample_rng(spec.seed, i))).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
    }

    #[test]
    fn small_runs_pass() {
        let spec = small(200);
        for report in [verify_coexistence(&spec), verify_identities(&spec)] {
            assert_eq!(report.failures(), 0, "{}", report.to_text());
        }
    }

    #[test]
    fn empty_run() {
        let report = verify_coexistence(&small(0));
        assert_eq!(report.failures(), 0);
        assert!(report.sections[0].properties.iter().all(|p| p.tried == 0));
    }

    #[test]
    fn resampling_avoids_rejections() {
        let spec = SampleSpec {
            policy: DegeneracyPolicy::Resample { max_attempts: 50 },
            entries: EntryDistribution::Rational { cap: 1 },
            ..small(50)
        };
        let report = verify_coexistence(&spec);
        assert_eq!(report.sections[0].properties[0].rejected, 0);
    }

    #[test]
    fn float_backend_runs() {
        let spec = SampleSpec { backend: Backend::Float, entries: EntryDistribution::Normal { std_dev: 1.0 }, ..small(100) };
        let report = VerifyReport::combine([verify_coexistence(&spec), verify_identities(&spec)]);
        assert_eq!(report.failures(), 0, "{}", report.to_text());
    }
}
