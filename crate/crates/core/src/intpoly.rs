//! Exact eigenvalue counting on integer matrices.
//!
//! A rational matrix `A` is scaled to the integer matrix `M = D A`, with `D`
//! the least common denominator of its entries. The eigenvalues of `A`
//! beyond `+-1` are those of `M` beyond `+-D`, and everything after the
//! scaling runs on big integers without any gcd normalization of fractions.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::scalar::Rational;

/// `D A` as a row-major integer matrix, together with `D`.
#[derive(Clone, Debug)]
pub(crate) struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
    denominator: BigInt,
}

impl IntMatrix {
    pub(crate) fn from_rationals(n: usize, entries: &[Rational]) -> Self {
        let denominator = entries.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let entries = entries.iter().map(|q| q.numer() * (&denominator / q.denom())).collect();
        IntMatrix { n, entries, denominator }
    }

    /// The scaled product, with denominator the product of both.
    pub(crate) fn mul(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            n: self.n,
            entries: mat_mul(self.n, &self.entries, &other.entries),
            denominator: &self.denominator * &other.denominator,
        }
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// `det(x I - M)`, lowest degree first. Faddeev-LeVerrier: on an integer
    /// matrix every intermediate matrix is integral and the division by `k`
    /// is exact.
    pub(crate) fn char_poly(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = vec![BigInt::zero(); n * n];
        for k in 1..=n {
            m = mat_mul(n, &self.entries, &m);
            for i in 0..n {
                m[i * n + i] += &coeffs[n - k + 1];
            }
            let am = mat_mul(n, &self.entries, &m);
            let trace: BigInt = (0..n).map(|i| &am[i * n + i]).sum();
            let (c, r) = trace.div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            coeffs[n - k] = -c;
        }
        coeffs
    }
}

fn mat_mul(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b[k * n + j];
                if !bkj.is_zero() {
                    out[i * n + j] += aik * bkj;
                }
            }
        }
    }
    out
}

/// Integer polynomial, lowest degree first, no trailing zeros.
type IntPoly = Vec<BigInt>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn degree(p: &IntPoly) -> usize {
    p.len().saturating_sub(1)
}

fn derivative(p: &IntPoly) -> IntPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn eval(p: &IntPoly, x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Divides by the positive gcd of the coefficients.
fn primitive(p: IntPoly) -> IntPoly {
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() || content.is_one() {
        p
    } else {
        p.into_iter().map(|c| c / &content).collect()
    }
}

/// A positive multiple of the remainder of `a` divided by `b`.
fn pseudo_remainder(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let lead = b.last().expect("nonzero divisor");
    let scale = lead.abs();
    let lead_sign = lead.signum();
    let mut r = a.clone();
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() * &lead_sign;
        for c in r.iter_mut() {
            *c *= &scale;
        }
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &factor * bi;
        }
        r = trim(r);
    }
    r
}

/// Divides out `x - root` for an integer root.
fn deflate(p: &IntPoly, root: &BigInt) -> IntPoly {
    let mut out = vec![BigInt::zero(); p.len() - 1];
    let mut carry = BigInt::zero();
    for i in (1..p.len()).rev() {
        carry = &p[i] + carry * root;
        out[i - 1] = carry.clone();
    }
    out
}

/// Sturm chain of `p`. Its last member is a multiple of `gcd(p, p')`.
fn sturm_chain(p: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![p.clone()];
    let d = primitive(derivative(p));
    if d.is_empty() {
        return chain;
    }
    chain.push(d);
    loop {
        let k = chain.len();
        let r = pseudo_remainder(&chain[k - 2], &chain[k - 1]);
        if r.is_empty() {
            return chain;
        }
        chain.push(primitive(r.into_iter().map(|c| -c).collect()));
    }
}

#[derive(Clone, Copy)]
enum At<'a> {
    MinusInfinity,
    Point(&'a BigInt),
    PlusInfinity,
}

fn sign_at(p: &IntPoly, at: At<'_>) -> i8 {
    let lead_sign = |p: &IntPoly| p.last().map_or(0, sign);
    match at {
        At::PlusInfinity => lead_sign(p),
        At::MinusInfinity => lead_sign(p) * if degree(p) % 2 == 0 { 1 } else { -1 },
        At::Point(x) => sign(&eval(p, x)),
    }
}

fn sign(x: &BigInt) -> i8 {
    match x.sign() {
        num::bigint::Sign::Plus => 1,
        num::bigint::Sign::Minus => -1,
        num::bigint::Sign::NoSign => 0,
    }
}

fn variations(chain: &[IntPoly], at: At<'_>) -> usize {
    let signs = chain.iter().map(|p| sign_at(p, at)).filter(|&s| s != 0);
    let mut count = 0;
    let mut previous = 0;
    for s in signs {
        if previous != 0 && s != previous {
            count += 1;
        }
        previous = s;
    }
    count
}

/// Real roots of `det(x I - M)` beyond `+-D`, with multiplicity, and
/// whether `+-D` are roots themselves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Beyond {
    pub above: usize,
    pub below: usize,
    pub at_plus: bool,
    pub at_minus: bool,
}

pub(crate) fn count_beyond(m: &IntMatrix) -> Beyond {
    let d = m.denominator().clone();
    let minus_d = -&d;
    let mut p = trim(m.char_poly());
    let mut result = Beyond::default();
    for (root, hit) in [(&d, &mut result.at_plus), (&minus_d, &mut result.at_minus)] {
        while degree(&p) > 0 && eval(&p, root).is_zero() {
            p = deflate(&p, root);
            *hit = true;
        }
    }
    // The distinct roots of gcd(g, g') are the roots of g of multiplicity at
    // least two, so summing distinct counts down this tower counts every
    // root with its multiplicity.
    let mut g = primitive(p);
    while degree(&g) > 0 {
        let chain = sturm_chain(&g);
        result.above += variations(&chain, At::Point(&d)) - variations(&chain, At::PlusInfinity);
        result.below += variations(&chain, At::MinusInfinity) - variations(&chain, At::Point(&minus_d));
        g = chain.last().unwrap().clone();
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn int_matrix(n: usize, entries: &[(i64, i64)]) -> IntMatrix {
        let q: Vec<Rational> = entries.iter().map(|&(p, d)| Rational::from_ratio(p, d)).collect();
        IntMatrix::from_rationals(n, &q)
    }

    #[test]
    fn scaling_uses_least_common_denominator() {
        let m = int_matrix(2, &[(1, 2), (1, 3), (-5, 6), (2, 1)]);
        assert_eq!(m.denominator(), &BigInt::from(6));
        assert_eq!(m.entries, [3, 2, -5, 12].map(BigInt::from));
    }

    #[test]
    fn char_poly_of_integer_matrix() {
        // [[2, 1], [1, 2]]: x^2 - 4x + 3.
        let m = int_matrix(2, &[(2, 1), (1, 1), (1, 1), (2, 1)]);
        assert_eq!(m.char_poly(), [3, -4, 1].map(BigInt::from));
    }

    #[test]
    fn counts_with_multiplicity_and_hits() {
        // diag(3/2, 3/2, -2, 1, 1/2).
        let e = |i: usize, j: usize, v: (i64, i64)| if i == j { v } else { (0, 1) };
        let diag = [(3, 2), (3, 2), (-2, 1), (1, 1), (1, 2)];
        let entries: Vec<(i64, i64)> = (0..25).map(|k| e(k / 5, k % 5, diag[k / 5])).collect();
        let b = count_beyond(&int_matrix(5, &entries));
        assert_eq!(b, Beyond { above: 2, below: 1, at_plus: true, at_minus: false });
    }

    #[test]
    fn rotation_has_no_real_eigenvalues() {
        let b = count_beyond(&int_matrix(2, &[(0, 1), (-3, 1), (3, 1), (0, 1)]));
        assert_eq!(b, Beyond::default());
    }

    proptest! {
        #[test]
        fn agrees_with_rational_sturm(n in 1usize..=4, raw in prop::collection::vec((-4i64..=4, 1i64..=3), 16)) {
            let q: Vec<Rational> = raw[..n * n].iter().map(|&(p, d)| Rational::from_ratio(p, d)).collect();
            let generic = crate::spectral::EigenSplit::of_char_poly(&Matrix::new(n, q.clone()).char_poly());
            let b = count_beyond(&IntMatrix::from_rationals(n, &q));
            prop_assert_eq!(b.above, generic.above_one);
            prop_assert_eq!(b.below, generic.below_minus_one);
            prop_assert_eq!(b.at_plus, generic.one_is_eigenvalue);
            prop_assert_eq!(b.at_minus, generic.minus_one_is_eigenvalue);
        }
    }
}
