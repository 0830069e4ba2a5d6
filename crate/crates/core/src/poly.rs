//! Univariate polynomials: Sturm-chain real root counting and an
//! Aberth-Ehrlich simultaneous root finder.

use std::fmt;

use num_complex::Complex64;

use crate::error::Error;
use crate::scalar::{Scalar, Sign};

/// Polynomial with coefficients in ascending order (`coeffs[i]` multiplies
/// `x^i`). Trailing exact zeros are trimmed, so the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// One end of an open interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint<T> {
    NegInfinity,
    Finite(T),
    PosInfinity,
}

/// Open real interval `(lower, upper)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    pub lower: Endpoint<T>,
    pub upper: Endpoint<T>,
}

impl<T> Interval<T> {
    /// `(value, +inf)`
    pub fn above(value: T) -> Self {
        Interval { lower: Endpoint::Finite(value), upper: Endpoint::PosInfinity }
    }

    /// `(-inf, value)`
    pub fn below(value: T) -> Self {
        Interval { lower: Endpoint::NegInfinity, upper: Endpoint::Finite(value) }
    }

    pub fn open(lower: T, upper: T) -> Self {
        Interval { lower: Endpoint::Finite(lower), upper: Endpoint::Finite(upper) }
    }

    pub fn real_line() -> Self {
        Interval { lower: Endpoint::NegInfinity, upper: Endpoint::PosInfinity }
    }
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `prod (x - r)` over `roots`, repeated roots included.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Poly::constant(T::one()), |acc, r| {
            acc.mul(&Poly::new(vec![-r.clone(), T::one()]))
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `sum |c_i| |x|^i`, the natural scale for deciding whether `p(x)` is
    /// zero on the float backend.
    pub fn eval_scale(&self, x: &T) -> f64 {
        let ax = x.to_f64().abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.to_f64().abs())
    }

    pub fn sign_at(&self, x: &T) -> Sign {
        self.eval(x).sign_in_band(self.eval_scale(x))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(T::zero);
        Poly::new((0..len).map(|i| get(self, i) - get(other, i)).collect())
    }

    pub fn scale(&self, factor: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| if c.abs() > m { c.abs() } else { m })
    }

    /// Divides by the largest coefficient magnitude (a positive constant, so
    /// signs are unchanged).
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m.is_zero() {
            return self.clone();
        }
        Poly::new(self.coeffs.iter().map(|c| c.clone() / m.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => {
                let inv = T::one() / lc.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Euclidean division. On the float backend, remainder coefficients that
    /// are negligible relative to the operands are flushed to zero.
    ///
    /// # Panics
    ///
    /// If `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let factor = rem[k + dd].clone() / lc.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - factor.clone() * d.clone();
            }
            rem[k + dd] = T::zero();
            quot[k] = factor;
        }
        rem.truncate(dd);
        let quot = Poly::new(quot);
        if !T::is_exact() {
            let scale = self.max_abs().to_f64().max(quot.max_abs().to_f64() * divisor.max_abs().to_f64());
            for c in rem.iter_mut() {
                if c.sign_in_band(scale).is_zero() {
                    *c = T::zero();
                }
            }
        }
        (quot, Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.normalized(), other.normalized());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.normalized();
        }
        a.monic()
    }

    /// Exact quotient; any remainder is dropped.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).0
    }

    /// Yun's square-free decomposition: `self = c * prod f_i^{m_i}` with each
    /// `f_i` square-free, monic and of positive degree. Returns `(f_i, m_i)`.
    pub fn square_free_factors(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).monic();
        let mut c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut multiplicity = 1;
        let degree = f.degree().unwrap_or(0);
        // Exact arithmetic always finishes within `degree` rounds; a float
        // gcd that misses a factor must not loop forever.
        while b.degree().unwrap_or(0) > 0 && multiplicity <= degree {
            let a = if d.is_zero() { b.clone() } else { b.gcd(&d) };
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), multiplicity));
            }
            b = b.div_exact(&a).monic();
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            multiplicity += 1;
        }
        if b.degree().unwrap_or(0) > 0 {
            out.push((b, 1));
        }
        out
    }

    /// Sturm chain `p, p', -rem(p, p'), ...` with each member normalized.
    /// `self` should be square-free.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.normalized()];
        if self.degree().unwrap_or(0) == 0 {
            return chain;
        }
        chain.push(self.derivative().normalized());
        loop {
            let k = chain.len();
            let (_, r) = chain[k - 2].div_rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-T::one()).normalized());
        }
        chain
    }

    /// Number of real roots strictly inside `interval`, counted with
    /// multiplicity.
    ///
    /// Fails with [`Error::DegenerateEndpoint`] if the polynomial vanishes at
    /// a finite endpoint (inside the zero band for floats).
    pub fn sturm_count(&self, interval: &Interval<T>) -> Result<usize, Error> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        for end in [&interval.lower, &interval.upper] {
            if let Endpoint::Finite(x) = end {
                if self.sign_at(x).is_zero() {
                    return Err(Error::DegenerateEndpoint { at: x.to_f64() });
                }
            }
        }
        Ok(self
            .square_free_factors()
            .iter()
            .map(|(f, m)| m * f.distinct_roots_in(interval))
            .sum())
    }

    /// Distinct roots in the open interval for a square-free polynomial
    /// that does not vanish at finite endpoints.
    pub(crate) fn distinct_roots_in(&self, interval: &Interval<T>) -> usize {
        let chain = self.sturm_chain();
        let lo = variations(&chain, &interval.lower);
        let hi = variations(&chain, &interval.upper);
        lo.saturating_sub(hi)
    }

    /// Divides out the linear factor `x - root` (synthetic division).
    pub fn deflate(&self, root: &T) -> Self {
        self.div_exact(&Poly::new(vec![-root.clone(), T::one()]))
    }

    /// Coefficients as complex floats, for the numeric root finder.
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| Complex64::new(c.to_f64(), 0.0)).collect()
    }
}

fn variations<T: Scalar>(chain: &[Poly<T>], at: &Endpoint<T>) -> usize {
    let signs = chain.iter().map(|p| match at {
        Endpoint::Finite(x) => p.sign_at(x),
        Endpoint::PosInfinity => p.leading().map_or(Sign::Zero, |c| c.sign_in_band(0.0)),
        Endpoint::NegInfinity => match p.leading() {
            None => Sign::Zero,
            Some(c) => c.sign_in_band(0.0) * Sign::parity(p.degree().unwrap()),
        },
    });
    let mut count = 0;
    let mut last = Sign::Zero;
    for s in signs.filter(|s| !s.is_zero()) {
        if !last.is_zero() && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

pub const ABERTH_MAX_ITERATIONS: usize = 1000;
pub const ABERTH_RESIDUAL: f64 = 1e-12;

/// All complex roots of a polynomial given by ascending float coefficients,
/// by Aberth-Ehrlich simultaneous iteration.
///
/// A root estimate is accepted once its backward residual
/// `|p(z)| / sum |c_i| |z|^i` drops to `1e-12`, or its Aberth correction
/// stalls below rounding level. Fails with [`Error::NoConvergence`] if the
/// iteration cap is reached first.
pub fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, Error> {
    let mut coeffs: Vec<Complex64> = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    // Exact zero roots are split off up front; the iteration cannot start
    // from a zero-radius circle.
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let coeffs = &coeffs[zeros.min(coeffs.len())..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(roots);
    }
    let lc = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lc).collect();
    if degree == 1 {
        roots.push(-monic[0]);
        return Ok(roots);
    }
    let deriv: Vec<Complex64> = monic.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let abs_coeffs: Vec<f64> = monic.iter().map(|c| c.norm()).collect();

    // Fujiwara bound on root moduli.
    let radius = (1..=degree)
        .map(|k| {
            let c = abs_coeffs[degree - k];
            if k == degree {
                (c / 2.0).powf(1.0 / k as f64)
            } else {
                c.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let horner = |c: &[Complex64], x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    let abs_horner = |x: f64| abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a);

    let mut done = vec![false; degree];
    for _ in 0..ABERTH_MAX_ITERATIONS {
        for k in 0..degree {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let p = horner(&monic, zk);
            let scale = abs_horner(zk.norm());
            if p.norm() <= 4.0 * f64::EPSILON * scale {
                done[k] = true;
                continue;
            }
            let dp = horner(&deriv, zk);
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = zk - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = if dp.norm() == 0.0 {
                // Stationary point: nudge off it.
                Complex64::new(radius * 1e-3, radius * 1e-3)
            } else {
                let ratio = p / dp;
                ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion)
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[k] = zk - step;
            if step.norm() <= 4.0 * f64::EPSILON * zk.norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            roots.extend(z);
            return Ok(roots);
        }
    }
    // Clustered roots rarely reach rounding-level residuals; accept them once
    // every backward residual is small enough.
    if z.iter().all(|&zk| horner(&monic, zk).norm() <= ABERTH_RESIDUAL * abs_horner(zk.norm())) {
        roots.extend(z);
        return Ok(roots);
    }
    Err(Error::NoConvergence { iterations: ABERTH_MAX_ITERATIONS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn diag_poly() -> Poly<Rational> {
        // lambda^2 - 0.5 lambda - 3 = (lambda - 2)(lambda + 1.5)
        Poly::new(vec![q(-3, 1), q(-1, 2), q(1, 1)])
    }

    #[test]
    fn counts_diagonal_example() {
        let p = diag_poly();
        assert_eq!(p.sturm_count(&Interval::above(q(1, 1))).unwrap(), 1);
        assert_eq!(p.sturm_count(&Interval::below(q(-1, 1))).unwrap(), 1);
        assert_eq!(p.sturm_count(&Interval::open(q(-1, 1), q(1, 1))).unwrap(), 0);
        assert_eq!(p.sturm_count(&Interval::real_line()).unwrap(), 2);
    }

    #[test]
    fn float_counts_diagonal_example() {
        let p = Poly::new(vec![-3.0, -0.5, 1.0]);
        assert_eq!(p.sturm_count(&Interval::above(1.0)).unwrap(), 1);
        assert_eq!(p.sturm_count(&Interval::below(-1.0)).unwrap(), 1);
    }

    #[test]
    fn endpoint_root_is_an_error() {
        let p = Poly::from_roots(&[q(1, 1), q(3, 1)]);
        assert!(matches!(p.sturm_count(&Interval::above(q(1, 1))), Err(Error::DegenerateEndpoint { .. })));
    }

    #[test]
    fn multiplicities_are_counted() {
        let p = Poly::from_roots(&[q(2, 1), q(2, 1), q(2, 1), q(-3, 1), q(-3, 1), q(1, 2)]);
        assert_eq!(p.sturm_count(&Interval::above(q(1, 1))).unwrap(), 3);
        assert_eq!(p.sturm_count(&Interval::below(q(-1, 1))).unwrap(), 2);
        let factors = p.square_free_factors();
        let mults: Vec<usize> = factors.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
    }

    #[test]
    fn complex_roots_are_not_counted() {
        // (x^2 + 1)(x - 5)
        let p = Poly::new(vec![q(1, 1), q(0, 1), q(1, 1)]).mul(&Poly::from_roots(&[q(5, 1)]));
        assert_eq!(p.sturm_count(&Interval::real_line()).unwrap(), 1);
        assert_eq!(p.sturm_count(&Interval::below(q(-1, 1))).unwrap(), 0);
    }

    #[test]
    fn aberth_simple() {
        // lambda^2 + 0.25: roots +-0.5i
        let roots = aberth_roots(&Poly::new(vec![0.25, 0.0, 1.0]).to_complex()).unwrap();
        for r in &roots {
            assert!((r.norm() - 0.5).abs() < 1e-12);
        }
        let roots = aberth_roots(&Poly::new(vec![-3.0, -0.5, 1.0]).to_complex()).unwrap();
        let radius = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        assert!((radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn aberth_zero_and_repeated_roots() {
        let roots = aberth_roots(&Poly::new(vec![0.0, 0.0, 0.0, 1.0]).to_complex()).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|r| r.norm() == 0.0));
        // (x - 2)^3 (x + 1)
        let p = Poly::from_roots(&[2.0, 2.0, 2.0, -1.0]);
        let roots = aberth_roots(&p.to_complex()).unwrap();
        let radius = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        assert!((radius - 2.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn sturm_matches_chosen_integer_roots(roots in prop::collection::vec(-6i64..=6, 1..=5), a in -7i64..=7, b in -7i64..=7) {
            prop_assume!(a != b);
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assume!(roots.iter().all(|&r| r != lo && r != hi));
            let p = Poly::from_roots(&roots.iter().map(|&r| q(r, 1)).collect::<Vec<_>>());
            let expected = roots.iter().filter(|&&r| r > lo && r < hi).count();
            prop_assert_eq!(p.sturm_count(&Interval::open(q(lo, 1), q(hi, 1))).unwrap(), expected);
            let above = roots.iter().filter(|&&r| r > hi).count();
            prop_assert_eq!(p.sturm_count(&Interval::above(q(hi, 1))).unwrap(), above);
        }

        #[test]
        fn aberth_recovers_real_roots(roots in prop::collection::vec(-40i64..=40, 1..=6)) {
            let mut distinct = roots.clone();
            distinct.sort();
            distinct.dedup();
            prop_assume!(distinct.len() == roots.len());
            let r: Vec<f64> = roots.iter().map(|&x| x as f64 / 8.0).collect();
            let found = aberth_roots(&Poly::from_roots(&r).to_complex()).unwrap();
            let radius = found.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let expected = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
            prop_assert!((radius - expected).abs() < 1e-8, "{} vs {}", radius, expected);
        }
    }
}
