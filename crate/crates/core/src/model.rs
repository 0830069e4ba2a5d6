//! The two-piece continuous piecewise-linear normal form
//!
//! ```text
//! x' = A_L x + b mu   if s = e1^T x <= 0
//! x' = A_R x + b mu   if s >= 0,        A_R = A_L + xi e1^T
//! ```
//!
//! and the closed-form branch quantities near `mu = 0`: the two fixed
//! points, the LR-cycle, their first components, admissibility and
//! stability. Every sign is computed twice, from the closed form and from
//! the eigenvalue parities, and the two are required to agree.

use std::fmt;

use crate::error::{Error, Piece};
use crate::matrix::{unit_vector, Matrix};
use crate::problem;
use crate::scalar::{Scalar, Sign};
use crate::spectral::{self, SpectralCounts, Stability};

/// Default cap on the state dimension.
pub const DEFAULT_MAX_DIMENSION: usize = 12;

/// Relative tolerance for float-backend cross-checks between two routes to
/// the same number.
pub const FLOAT_CHECK_TOLERANCE: f64 = 1e-10;

/// A continuous two-piece map in normal form. `A_R` and `rho` are derived,
/// never supplied, so continuity cannot be violated.
#[derive(Clone, PartialEq)]
pub struct PwlMap<T> {
    left: Matrix<T>,
    right: Matrix<T>,
    b: Vec<T>,
    xi: Vec<T>,
    rho: Vec<T>,
}

impl<T: Scalar> PwlMap<T> {
    /// Builds the map from `A_L`, the continuity vector `xi` and `b`.
    pub fn new(left: Matrix<T>, xi: Vec<T>, b: Vec<T>) -> Result<Self, Error> {
        Self::with_max_dimension(left, xi, b, DEFAULT_MAX_DIMENSION)
    }

    pub fn with_max_dimension(left: Matrix<T>, xi: Vec<T>, b: Vec<T>, cap: usize) -> Result<Self, Error> {
        let n = left.dim();
        if xi.len() != n {
            return Err(Error::DimensionMismatch(format!("A_L is {n}x{n} but xi has length {}", xi.len())));
        }
        let right = left.rank_one_update(&xi, &unit_vector(n, 0));
        Self::assemble(left, right, b, cap)
    }

    /// Builds the map from both pieces; they may differ only in their first
    /// column.
    pub fn from_pieces(left: Matrix<T>, right: Matrix<T>, b: Vec<T>) -> Result<Self, Error> {
        let n = left.dim();
        if right.dim() != n {
            return Err(Error::DimensionMismatch(format!("A_L is {n}x{n} but A_R is {0}x{0}", right.dim())));
        }
        for row in 0..n {
            for col in 1..n {
                if left.get(row, col) != right.get(row, col) {
                    return Err(Error::Discontinuous { row, col });
                }
            }
        }
        Self::assemble(left, right, b, DEFAULT_MAX_DIMENSION)
    }

    /// `xi` is always stored as the difference of the first columns, so a
    /// float map written out with its pieces reads back identically.
    fn assemble(left: Matrix<T>, right: Matrix<T>, b: Vec<T>, cap: usize) -> Result<Self, Error> {
        let n = left.dim();
        if n > cap {
            return Err(Error::DimensionTooLarge { dim: n, cap });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("A_L is {n}x{n} but b has length {}", b.len())));
        }
        let xi = (0..n).map(|r| right.get(r, 0).clone() - left.get(r, 0).clone()).collect();
        let rho = (&Matrix::identity(n) - &left).adjugate().row(0).to_vec();
        Ok(PwlMap { left, right, b, xi, rho })
    }

    /// The scalar map `x' = a_L x + b mu` / `a_R x + b mu`.
    pub fn one_dimensional(a_left: T, a_right: T, b: T) -> Self {
        Self::from_pieces(Matrix::new(1, vec![a_left]), Matrix::new(1, vec![a_right]), vec![b])
            .expect("1x1 pieces are always continuous")
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn left(&self) -> &Matrix<T> {
        &self.left
    }

    pub fn right(&self) -> &Matrix<T> {
        &self.right
    }

    pub fn matrix(&self, piece: Piece) -> &Matrix<T> {
        match piece {
            Piece::Left => &self.left,
            Piece::Right => &self.right,
        }
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    /// `e1^T adj(I - A_L)`, which equals `e1^T adj(I - A_R)`.
    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn rho_b(&self) -> T {
        crate::matrix::dot(&self.rho, &self.b)
    }

    pub fn rho_b_sign(&self) -> Sign {
        let scale: f64 = self.rho.iter().zip(&self.b).map(|(r, b)| (r.to_f64() * b.to_f64()).abs()).sum();
        self.rho_b().sign_in_band(scale)
    }

    /// `A_R A_L`, the linearization of the LR-cycle.
    pub fn cycle_matrix(&self) -> Matrix<T> {
        &self.right * &self.left
    }

    /// One affine half-map `A_J x + b mu`.
    pub fn half_map(&self, piece: Piece, x: &[T], mu: &T) -> Vec<T> {
        let ax = self.matrix(piece).mul_vec(x);
        ax.into_iter().zip(&self.b).map(|(v, b)| v + b.clone() * mu.clone()).collect()
    }

    /// Rounds both pieces and `b` to floats.
    pub fn to_f64(&self) -> PwlMap<f64> {
        PwlMap::assemble(self.left.to_f64(), self.right.to_f64(), self.b.iter().map(T::to_f64).collect(), self.dim())
            .expect("dimensions are unchanged")
    }

    /// Rebuilds the map over another scalar from its `A_L`, `xi` and `b`.
    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PwlMap<U> {
        let n = self.dim();
        PwlMap::with_max_dimension(
            self.left.map(&f),
            self.xi.iter().map(&f).collect(),
            self.b.iter().map(&f).collect(),
            n,
        )
        .expect("dimensions are unchanged")
    }

    /// A problem-file rendering of the map, suitable as a failure witness.
    pub fn witness(&self) -> String {
        problem::to_json(self)
    }
}

impl<T: Scalar> fmt::Debug for PwlMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PwlMap")
            .field("left", &self.left)
            .field("right", &self.right)
            .field("b", &self.b)
            .finish()
    }
}

/// The three invariant sets tracked near the bifurcation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    FixedLeft,
    FixedRight,
    LrCycle,
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Object::FixedLeft => "x^L",
            Object::FixedRight => "x^R",
            Object::LrCycle => "LR-cycle",
        })
    }
}

/// A sign of the bifurcation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MuSide {
    Negative,
    Positive,
}

impl MuSide {
    pub const BOTH: [MuSide; 2] = [MuSide::Negative, MuSide::Positive];

    pub fn sign(self) -> Sign {
        match self {
            MuSide::Negative => Sign::Negative,
            MuSide::Positive => Sign::Positive,
        }
    }

    /// `-1` or `+1`.
    pub fn unit<T: Scalar>(self) -> T {
        match self {
            MuSide::Negative => -T::one(),
            MuSide::Positive => T::one(),
        }
    }

    pub fn of(mu: f64) -> Option<MuSide> {
        if mu < 0.0 {
            Some(MuSide::Negative)
        } else if mu > 0.0 {
            Some(MuSide::Positive)
        } else {
            None
        }
    }
}

impl fmt::Display for MuSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MuSide::Negative => "μ<0",
            MuSide::Positive => "μ>0",
        })
    }
}

/// For which sign of `mu` an object is admissible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Admissibility {
    MuNegative,
    MuPositive,
    /// Every first component vanishes identically; the object sits on the
    /// switching manifold for all `mu` and is not classified.
    BothDegenerate,
    Neither,
}

impl Admissibility {
    pub fn side(self) -> Option<MuSide> {
        match self {
            Admissibility::MuNegative => Some(MuSide::Negative),
            Admissibility::MuPositive => Some(MuSide::Positive),
            _ => None,
        }
    }

    pub fn includes(self, side: MuSide) -> bool {
        match self {
            Admissibility::BothDegenerate => true,
            Admissibility::Neither => false,
            _ => self.side() == Some(side),
        }
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Admissibility::MuNegative => "admissible for μ<0",
            Admissibility::MuPositive => "admissible for μ>0",
            Admissibility::BothDegenerate => "degenerate (on the switching manifold)",
            Admissibility::Neither => "not admissible for any μ≠0",
        })
    }
}

/// Which side of the switching manifold a point must lie on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    /// `s <= 0`
    Left,
    /// `s >= 0`
    Right,
}

impl Region {
    fn accepts(self, s: Sign) -> bool {
        match self {
            Region::Left => s != Sign::Positive,
            Region::Right => s != Sign::Negative,
        }
    }
}

fn admissibility(signs: &[Sign], regions: &[Region]) -> Admissibility {
    let ok = |side: MuSide| signs.iter().zip(regions).all(|(&s, r)| r.accepts(s * side.sign()));
    match (ok(MuSide::Negative), ok(MuSide::Positive)) {
        (true, true) => Admissibility::BothDegenerate,
        (true, false) => Admissibility::MuNegative,
        (false, true) => Admissibility::MuPositive,
        (false, false) => Admissibility::Neither,
    }
}

/// Closed-form description of one object near the bifurcation.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchReport<T> {
    pub object: Object,
    /// First components per unit `mu > 0`: `[s^J]` for a fixed point,
    /// `[s^LR, s^RL]` for the cycle. They scale linearly in `mu`.
    pub first_components: Vec<T>,
    pub signs: Vec<Sign>,
    pub admissible_for: Admissibility,
    /// The point(s) at `mu = 1`.
    pub points: Vec<Vec<T>>,
    pub stability: Stability,
}

impl<T: Scalar> BranchReport<T> {
    pub fn points_at(&self, mu: &T) -> Vec<Vec<T>> {
        self.points
            .iter()
            .map(|p| p.iter().map(|x| x.clone() * mu.clone()).collect())
            .collect()
    }

    /// Point(s) at `mu = +-1` on the admissible side, if there is one.
    pub fn admissible_points(&self) -> Option<(MuSide, Vec<Vec<T>>)> {
        let side = self.admissible_for.side()?;
        Some((side, self.points_at(&side.unit())))
    }

    pub fn is_admissible_on(&self, side: MuSide) -> bool {
        self.admissible_for.includes(side)
    }
}

impl<T: Scalar> fmt::Display for BranchReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = match self.object {
            Object::LrCycle => &["s^LR", "s^RL"],
            Object::FixedLeft => &["s^L"],
            Object::FixedRight => &["s^R"],
        };
        write!(f, "{}: ", self.object)?;
        for (i, name) in names.iter().enumerate() {
            write!(f, "{name} = {} μ ({}), ", self.first_components[i], self.signs[i])?;
        }
        write!(f, "{}, {}", self.admissible_for, self.stability)
    }
}

fn inconsistent<T: Scalar>(check: &'static str, map: &PwlMap<T>, detail: String) -> Error {
    Error::Inconsistent { check, witness: format!("{detail}\nmap: {}", map.witness()) }
}

/// The two candidate fixed points `x^J = (I - A_J)^{-1} b mu`.
pub fn fixed_points<T: Scalar>(map: &PwlMap<T>) -> Result<(BranchReport<T>, BranchReport<T>), Error> {
    let counts = spectral::counts(map.left(), map.right());
    fixed_points_with(map, &counts)
}

pub(crate) fn fixed_points_with<T: Scalar>(
    map: &PwlMap<T>,
    counts: &SpectralCounts,
) -> Result<(BranchReport<T>, BranchReport<T>), Error> {
    let left = fixed_point(map, Piece::Left, counts.sigma_l_plus)?;
    let right = fixed_point(map, Piece::Right, counts.sigma_r_plus)?;
    Ok((left, right))
}

fn fixed_point<T: Scalar>(map: &PwlMap<T>, piece: Piece, sigma_plus: usize) -> Result<BranchReport<T>, Error> {
    let n = map.dim();
    let a = map.matrix(piece);
    let i_minus_a = &Matrix::identity(n) - a;
    let det = i_minus_a.det();
    let det_sign = det.sign_in_band(i_minus_a.det_scale());
    if det_sign.is_zero() {
        return Err(Error::EigOneDegenerate(piece));
    }
    let rho_b_sign = map.rho_b_sign();
    if rho_b_sign.is_zero() {
        return Err(Error::NondegeneracyViolated);
    }
    let s = map.rho_b() / det;
    let closed = rho_b_sign * det_sign;
    let parity = Sign::parity(sigma_plus) * rho_b_sign;
    if closed != parity {
        return Err(inconsistent(
            "fixed-point sign parity",
            map,
            format!("{piece}: closed-form sign {closed}, parity sign {parity} (sigma+ = {sigma_plus})"),
        ));
    }
    let point = i_minus_a.solve(map.b()).ok_or(Error::EigOneDegenerate(piece))?;
    if !point[0].approx_eq(&s, FLOAT_CHECK_TOLERANCE) {
        return Err(inconsistent(
            "fixed-point first component",
            map,
            format!("{piece}: adjugate formula gives {s}, linear solve gives {}", point[0]),
        ));
    }
    let (object, region) = match piece {
        Piece::Left => (Object::FixedLeft, Region::Left),
        Piece::Right => (Object::FixedRight, Region::Right),
    };
    Ok(BranchReport {
        object,
        first_components: vec![s],
        signs: vec![closed],
        admissible_for: admissibility(&[closed], &[region]),
        points: vec![point],
        stability: Stability::of(a),
    })
}

/// The LR-cycle `{x^LR, x^RL}` with `x^RL = f^L(x^LR)`, `x^LR = f^R(x^RL)`.
pub fn lr_cycle<T: Scalar>(map: &PwlMap<T>) -> Result<BranchReport<T>, Error> {
    let counts = spectral::counts(map.left(), map.right());
    lr_cycle_with(map, &counts)
}

pub(crate) fn lr_cycle_with<T: Scalar>(map: &PwlMap<T>, counts: &SpectralCounts) -> Result<BranchReport<T>, Error> {
    let n = map.dim();
    let id = Matrix::identity(n);
    let cycle = map.cycle_matrix();
    let i_minus_rl = &id - &cycle;
    let d = i_minus_rl.det();
    let d_sign = d.sign_in_band(i_minus_rl.det_scale());
    if d_sign.is_zero() {
        return Err(Error::EigOneDegenerateRL);
    }
    let rho_b_sign = map.rho_b_sign();
    if rho_b_sign.is_zero() {
        return Err(Error::NondegeneracyViolated);
    }
    let i_plus_r = &id + map.right();
    let i_plus_l = &id + map.left();
    let det_plus_r = i_plus_r.det();
    let det_plus_l = i_plus_l.det();
    let sign_plus_r = det_plus_r.sign_in_band(i_plus_r.det_scale());
    let sign_plus_l = det_plus_l.sign_in_band(i_plus_l.det_scale());
    let rho_b = map.rho_b();
    let s_lr = det_plus_r * rho_b.clone() / d.clone();
    let s_rl = det_plus_l * rho_b / d;
    #[cfg(feature = "fault-injection")]
    let s_lr = -s_lr;
    let signs = vec![sign_plus_r * rho_b_sign * d_sign, sign_plus_l * rho_b_sign * d_sign];

    let x_lr = i_minus_rl.solve(&i_plus_r.mul_vec(map.b())).ok_or(Error::EigOneDegenerateRL)?;
    let x_rl = map.half_map(Piece::Left, &x_lr, &T::one());
    if !x_lr[0].approx_eq(&s_lr, FLOAT_CHECK_TOLERANCE) || !x_rl[0].approx_eq(&s_rl, FLOAT_CHECK_TOLERANCE) {
        return Err(inconsistent(
            "LR-cycle first components",
            map,
            format!(
                "closed form (s^LR, s^RL) = ({s_lr}, {s_rl}), linear solve gives ({}, {})",
                x_lr[0], x_rl[0]
            ),
        ));
    }
    let back = map.half_map(Piece::Right, &x_rl, &T::one());
    let closes = back.iter().zip(&x_lr).all(|(a, b)| a.approx_eq(b, FLOAT_CHECK_TOLERANCE));
    if !closes {
        return Err(inconsistent("LR-cycle orbit closure", map, "f^R(x^RL) != x^LR".into()));
    }
    let parity_checks = [
        (counts.degenerate.eig_minus_one_right, counts.sigma_r_minus, signs[0], "s^LR"),
        (counts.degenerate.eig_minus_one_left, counts.sigma_l_minus, signs[1], "s^RL"),
    ];
    for (skip, sigma_minus, closed, name) in parity_checks {
        if skip || closed.is_zero() {
            continue;
        }
        let parity = Sign::parity(sigma_minus + counts.sigma_lr_plus) * rho_b_sign;
        if parity != closed {
            return Err(inconsistent(
                "LR-cycle sign parity",
                map,
                format!("{name}: closed-form sign {closed}, parity sign {parity}"),
            ));
        }
    }
    Ok(BranchReport {
        object: Object::LrCycle,
        first_components: vec![s_lr, s_rl],
        admissible_for: admissibility(&signs, &[Region::Left, Region::Right]),
        signs,
        points: vec![x_lr, x_rl],
        stability: Stability::of(&cycle),
    })
}

/// Checks that a period-two orbit confined to one side is just that side's
/// fixed point: the unique fixed point of `f^J o f^J` equals `x^J`, for both
/// `J = L, R`.
pub fn same_side_period_two_is_fixed_point<T: Scalar>(map: &PwlMap<T>) -> Result<bool, Error> {
    let n = map.dim();
    let id = Matrix::identity(n);
    for piece in [Piece::Left, Piece::Right] {
        let a = map.matrix(piece);
        let i_minus = &id - a;
        let i_plus = &id + a;
        if i_minus.det_sign().is_zero() {
            return Err(Error::EigOneDegenerate(piece));
        }
        if i_plus.det_sign().is_zero() {
            return Err(Error::EigMinusOneDegenerate(piece));
        }
        let fixed = i_minus.solve(map.b()).ok_or(Error::EigOneDegenerate(piece))?;
        let squared = &id - &(a * a);
        let two_periodic = squared
            .solve(&i_plus.mul_vec(map.b()))
            .ok_or(Error::EigMinusOneDegenerate(piece))?;
        if !fixed.iter().zip(&two_periodic).all(|(x, y)| x.approx_eq(y, FLOAT_CHECK_TOLERANCE)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signs of `det(I + A_R + A_R A_L)`, `det(I + A_L + A_L A_R)` and
/// `det(I + A_L + A_L^2)`.
pub fn llr_determinant_signs<T: Scalar>(map: &PwlMap<T>) -> Result<[Sign; 3], Error> {
    let id = Matrix::identity(map.dim());
    let (l, r) = (map.left(), map.right());
    let candidates = [
        (&(&id + r) + &(r * l), "det(I + A_R + A_R A_L)"),
        (&(&id + l) + &(l * r), "det(I + A_L + A_L A_R)"),
        (&(&id + l) + &(l * l), "det(I + A_L + A_L^2)"),
    ];
    let mut signs = [Sign::Zero; 3];
    for (slot, (m, name)) in signs.iter_mut().zip(candidates) {
        *slot = m.det_sign();
        if slot.is_zero() {
            return Err(Error::DegenerateDeterminant(name));
        }
    }
    Ok(signs)
}

/// Whether a generic LLR-cycle is admissible for exactly one sign of `mu`.
pub fn llr_admissible_one_side<T: Scalar>(map: &PwlMap<T>) -> Result<bool, Error> {
    let [a, b, c] = llr_determinant_signs(map)?;
    Ok(a == b && b != c)
}
