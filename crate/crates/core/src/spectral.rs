//! Real-eigenvalue counts outside `[-1, 1]` and spectral radii.
//!
//! Counts come from Sturm chains on characteristic polynomials over the
//! integers, so they are exact on both backends. Eigenvalues are counted with
//! multiplicity; the determinant-sign parities only hold that way.

use std::fmt;

use crate::error::Error;
use crate::intpoly::{count_beyond, IntMatrix};
use crate::matrix::Matrix;
use crate::poly::{aberth_roots, Interval, Poly};
use crate::scalar::{Rational, Scalar};

/// Spectral radii within this distance of 1 give [`Stability::Marginal`].
pub const MARGINAL_BAND: f64 = 1e-8;

/// Real eigenvalues of one matrix relative to `+-1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EigenSplit {
    /// Real eigenvalues `> 1`, with multiplicity.
    pub above_one: usize,
    /// Real eigenvalues `< -1`, with multiplicity.
    pub below_minus_one: usize,
    pub one_is_eigenvalue: bool,
    pub minus_one_is_eigenvalue: bool,
}

impl EigenSplit {
    /// Exact on both backends; see [`counts`].
    pub fn of<T: Scalar>(m: &Matrix<T>) -> Self {
        let b = count_beyond(&IntMatrix::from_rationals(m.dim(), &exact_entries(m)));
        EigenSplit {
            above_one: b.above,
            below_minus_one: b.below,
            one_is_eigenvalue: b.at_plus,
            minus_one_is_eigenvalue: b.at_minus,
        }
    }

    /// The same split from a characteristic polynomial, with Sturm chains in
    /// the polynomial's own arithmetic.
    pub fn of_char_poly<T: Scalar>(p: &Poly<T>) -> Self {
        let one = T::one();
        let minus_one = -T::one();
        let (above_one, one_is_eigenvalue) = count_past(p, &one, Interval::above(one.clone()));
        let (below_minus_one, minus_one_is_eigenvalue) =
            count_past(p, &minus_one, Interval::below(minus_one.clone()));
        EigenSplit { above_one, below_minus_one, one_is_eigenvalue, minus_one_is_eigenvalue }
    }
}

/// Counts roots in `interval` whose only finite endpoint is `threshold`.
/// Roots sitting exactly at `threshold` are divided out and reported.
fn count_past<T: Scalar>(p: &Poly<T>, threshold: &T, interval: Interval<T>) -> (usize, bool) {
    let hit = p.sign_at(threshold).is_zero();
    let total = p
        .square_free_factors()
        .into_iter()
        .map(|(mut f, multiplicity)| {
            while f.degree().unwrap_or(0) > 0 && f.sign_at(threshold).is_zero() {
                f = f.deflate(threshold);
            }
            if f.degree().unwrap_or(0) == 0 {
                0
            } else {
                multiplicity * f.distinct_roots_in(&interval)
            }
        })
        .sum();
    (total, hit)
}

/// Which genericity conditions fail, as seen from the spectra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegeneracyFlags {
    pub eig_one_left: bool,
    pub eig_one_right: bool,
    pub eig_minus_one_left: bool,
    pub eig_minus_one_right: bool,
    /// 1 is an eigenvalue of `A_R A_L`.
    pub eig_one_cycle: bool,
}

impl DegeneracyFlags {
    pub fn any(&self) -> bool {
        self.eig_one_left
            || self.eig_one_right
            || self.eig_minus_one_left
            || self.eig_minus_one_right
            || self.eig_one_cycle
    }

    pub fn involves_left(&self) -> bool {
        self.eig_one_left || self.eig_minus_one_left
    }

    pub fn involves_right(&self) -> bool {
        self.eig_one_right || self.eig_minus_one_right
    }
}

/// The sigma counts of a pair `(A_L, A_R)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpectralCounts {
    /// Real eigenvalues of `A_L` greater than 1.
    pub sigma_l_plus: usize,
    /// Real eigenvalues of `A_L` less than -1.
    pub sigma_l_minus: usize,
    pub sigma_r_plus: usize,
    pub sigma_r_minus: usize,
    /// Real eigenvalues of `A_R A_L` greater than 1.
    pub sigma_lr_plus: usize,
    /// Real eigenvalues of `A_L^2` greater than 1.
    pub sigma_ll_plus: usize,
    pub degenerate: DegeneracyFlags,
}

impl SpectralCounts {
    /// `sigma_L^+ + sigma_R^+`; odd means a nonsmooth fold.
    pub fn plus_sum(&self) -> usize {
        self.sigma_l_plus + self.sigma_r_plus
    }

    /// `sigma_L^- + sigma_R^-`; odd means an admissible LR-cycle.
    pub fn minus_sum(&self) -> usize {
        self.sigma_l_minus + self.sigma_r_minus
    }

    /// `sigma_LL^+ + sigma_LR^+`; picks the fixed point the cycle sits with.
    pub fn cycle_sum(&self) -> usize {
        self.sigma_ll_plus + self.sigma_lr_plus
    }
}

impl fmt::Display for SpectralCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  sigma_L+  = {}    sigma_L-  = {}", self.sigma_l_plus, self.sigma_l_minus)?;
        writeln!(f, "  sigma_R+  = {}    sigma_R-  = {}", self.sigma_r_plus, self.sigma_r_minus)?;
        write!(f, "  sigma_LR+ = {}    sigma_LL+ = {}", self.sigma_lr_plus, self.sigma_ll_plus)
    }
}

/// All six sigma counts and the degeneracy flags.
///
/// # Panics
///
/// If the matrices differ in dimension.
pub fn counts<T: Scalar>(left: &Matrix<T>, right: &Matrix<T>) -> SpectralCounts {
    assert_eq!(left.dim(), right.dim(), "A_L and A_R must have the same dimension");
    let l = IntMatrix::from_rationals(left.dim(), &exact_entries(left));
    let r = IntMatrix::from_rationals(right.dim(), &exact_entries(right));
    let (bl, br) = (count_beyond(&l), count_beyond(&r));
    let blr = count_beyond(&r.mul(&l));
    let bll = count_beyond(&l.mul(&l));
    let mut counts = SpectralCounts {
        sigma_l_plus: bl.above,
        sigma_l_minus: bl.below,
        sigma_r_plus: br.above,
        sigma_r_minus: br.below,
        sigma_lr_plus: blr.above,
        sigma_ll_plus: bll.above,
        degenerate: DegeneracyFlags {
            eig_one_left: bl.at_plus,
            eig_one_right: br.at_plus,
            eig_minus_one_left: bl.at_minus,
            eig_minus_one_right: br.at_minus,
            eig_one_cycle: blr.at_plus,
        },
    };
    if !T::is_exact() {
        // Float data near a degenerate matrix is treated as degenerate.
        let near = |m: &Matrix<T>, x: i64| m.char_poly().sign_at(&T::from_i64(x)).is_zero();
        let flags = &mut counts.degenerate;
        flags.eig_one_left |= near(left, 1);
        flags.eig_one_right |= near(right, 1);
        flags.eig_minus_one_left |= near(left, -1);
        flags.eig_minus_one_right |= near(right, -1);
        flags.eig_one_cycle |= near(&(right * left), 1);
    }
    counts
}

/// Every finite float is an exact rational, so float matrices are counted
/// exactly as given. Non-finite entries count as zero.
fn exact_entries<T: Scalar>(m: &Matrix<T>) -> Vec<Rational> {
    let n = m.dim();
    (0..n * n).map(|k| m.get(k / n, k % n).to_rational().unwrap_or_default()).collect()
}

/// Largest eigenvalue modulus, from the roots of the characteristic
/// polynomial. Always computed in floating point.
pub fn spectral_radius<T: Scalar>(m: &Matrix<T>) -> Result<f64, Error> {
    let roots = aberth_roots(&m.map(T::to_f64).char_poly().to_complex())?;
    Ok(roots.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Whether an orbit with linearization `m` attracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Yes,
    No,
    /// Spectral radius within [`MARGINAL_BAND`] of 1, or not computable.
    Marginal,
}

impl Stability {
    pub fn from_radius(radius: f64) -> Self {
        if radius < 1.0 - MARGINAL_BAND {
            Stability::Yes
        } else if radius > 1.0 + MARGINAL_BAND {
            Stability::No
        } else {
            Stability::Marginal
        }
    }

    pub fn of<T: Scalar>(m: &Matrix<T>) -> Self {
        spectral_radius(m).map_or(Stability::Marginal, Stability::from_radius)
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Yes => "stable",
            Stability::No => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}
