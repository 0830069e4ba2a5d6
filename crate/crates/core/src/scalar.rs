//! Number backends.
//!
//! Every sign-critical quantity in this crate is computed over a [`Scalar`].
//! Two backends exist: [`Rational`] (arbitrary-precision fractions, exact) and
//! `f64` (binary64 with a relative zero band). The exact backend never reports
//! a spurious zero or a wrong sign; the float backend reports [`Sign::Zero`]
//! for anything inside the band so callers can treat it as degenerate.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num::bigint::Sign as BigSign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::matrix::Matrix;

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Half-width of the float zero band, relative to the natural scale of the
/// quantity being tested.
pub const ZERO_BAND: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" | "exact" => Ok(Backend::Rational),
            "float" | "f64" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected rational or float)")),
        }
    }
}

/// Three-valued sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    /// `(-1)^exponent`.
    pub fn parity(exponent: usize) -> Sign {
        if exponent % 2 == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Negative
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Sign::Negative => "NEG",
            Sign::Zero => "ZERO",
            Sign::Positive => "POS",
        };
        f.write_str(name)
    }
}

/// A real number backend.
///
/// Arithmetic is by value; the few algorithms that need backend-specific
/// kernels (determinant, entry parsing) dispatch through the trait.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Signed + Send + Sync + 'static
{
    const BACKEND: Backend;

    fn from_ratio(numerator: i64, denominator: i64) -> Self;

    fn from_i64(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    /// Converts a finite float; `None` for NaN or infinities.
    fn from_f64(value: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Nearest value to an exact rational.
    fn from_rational(value: &Rational) -> Self;

    /// The exact value; every finite float is a rational. `None` for NaN or
    /// infinities.
    fn to_rational(&self) -> Option<Rational>;

    /// Sign of `self`, treating `|self| <= ZERO_BAND * scale` as zero on the
    /// float backend. The exact backend ignores `scale`.
    fn sign_in_band(&self, scale: f64) -> Sign;

    /// Equality up to `rel * max(1, |a|, |b|)` on the float backend, exact
    /// equality otherwise.
    fn approx_eq(&self, other: &Self, rel: f64) -> bool;

    /// Determinant kernel: fraction-free Bareiss for the exact backend,
    /// partial-pivot LU for floats.
    fn determinant(m: &Matrix<Self>) -> Self;

    /// Parses a decimal (`-1.25`, `3e-2`) or fraction (`-7/3`) literal.
    fn parse_entry(text: &str) -> Option<Self>;

    /// Text that [`Scalar::parse_entry`] maps back to the identical value.
    fn render(&self) -> String;

    fn is_exact() -> bool {
        Self::BACKEND == Backend::Rational
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn from_ratio(numerator: i64, denominator: i64) -> Self {
        BigRational::new(numerator.into(), denominator.into())
    }

    fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value)
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        // `BigRational::to_f64` overflows to inf for large numerators even if
        // the quotient is moderate, so fall back on a scaled division.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.numer().bits().max(self.denom().bits()) as i64 - 60;
                let shift = shift.max(0) as u32;
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(0.0);
                if d == 0.0 {
                    if n.is_sign_negative() {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                } else {
                    n / d
                }
            }
        }
    }

    fn sign_in_band(&self, _scale: f64) -> Sign {
        match self.numer().sign() {
            BigSign::Minus => Sign::Negative,
            BigSign::NoSign => Sign::Zero,
            BigSign::Plus => Sign::Positive,
        }
    }

    fn approx_eq(&self, other: &Self, _rel: f64) -> bool {
        self == other
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        bareiss_determinant(m)
    }

    fn parse_entry(text: &str) -> Option<Self> {
        parse_exact(text)
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_ratio(numerator: i64, denominator: i64) -> Self {
        numerator as f64 / denominator as f64
    }

    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn from_rational(value: &Rational) -> Self {
        Scalar::to_f64(value)
    }

    fn to_rational(&self) -> Option<Rational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign_in_band(&self, scale: f64) -> Sign {
        if self.abs() <= ZERO_BAND * scale.abs() {
            Sign::Zero
        } else if *self < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= rel * scale
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        lu_determinant(m)
    }

    fn parse_entry(text: &str) -> Option<Self> {
        let text = text.trim();
        let value = match text.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().ok()?;
                let q: f64 = q.trim().parse().ok()?;
                if q == 0.0 {
                    return None;
                }
                p / q
            }
            None => text.parse().ok()?,
        };
        value.is_finite().then_some(value)
    }

    fn render(&self) -> String {
        // `{:?}` is the shortest round-tripping representation.
        format!("{self:?}")
    }
}

/// Parses `p/q` or a decimal literal with optional exponent into an exact
/// fraction.
fn parse_exact(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = parse_exact(p)?;
        let q = parse_exact(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(at) => (&text[..at], text[at + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Bareiss fraction-free elimination. Rows are first cleared of
/// denominators so the elimination runs over integers.
fn bareiss_determinant(m: &Matrix<Rational>) -> Rational {
    let n = m.dim();
    let mut scale = BigInt::one();
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|r| {
            let row = m.row(r);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &lcm;
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();

    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if rows[k][k].is_zero() {
            match (k + 1..n).find(|&r| !rows[r][k].is_zero()) {
                Some(r) => {
                    rows.swap(k, r);
                    negate = !negate;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &rows[i][j] * &rows[k][k] - &rows[i][k] * &rows[k][j];
                rows[i][j] = v / &prev;
            }
            rows[i][k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    let det = BigRational::new(prev, scale);
    if negate {
        -det
    } else {
        det
    }
}

fn lu_determinant(m: &Matrix<f64>) -> f64 {
    let n = m.dim();
    let mut a: Vec<f64> = m.entries().to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        if a[pivot * n + k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            for c in 0..n {
                a.swap(k * n + c, pivot * n + c);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for i in k + 1..n {
            let factor = a[i * n + k] / p;
            for c in k + 1..n {
                a[i * n + c] -= factor * a[k * n + c];
            }
        }
    }
    det
}
