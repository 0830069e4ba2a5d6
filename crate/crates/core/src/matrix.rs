//! Dense square matrices over a [`Scalar`] backend.
//!
//! Only what the border-collision analysis needs: products, determinants,
//! adjugates, characteristic polynomials and linear solves. Sizes are tiny
//! (a dozen rows at most), so everything is a flat row-major `Vec`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::Poly;
use crate::scalar::{Scalar, Sign};

/// Dimension above which adjugates go through an exact inverse instead of
/// `n^2` cofactor determinants.
const COFACTOR_ADJUGATE_MAX_DIM: usize = 4;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds an `n x n` matrix from row-major entries.
    ///
    /// # Panics
    ///
    /// If `entries.len() != n * n` or `n == 0`.
    pub fn new(n: usize, entries: Vec<T>) -> Self {
        assert!(n > 0, "matrix dimension must be at least 1");
        assert_eq!(entries.len(), n * n, "expected {n}x{n} entries");
        Matrix { n, entries }
    }

    /// Builds a matrix from rows; `None` unless the rows form a non-empty square.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(n: usize) -> Self {
        Matrix::new(n, vec![T::zero(); n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = T::one();
        }
        m
    }

    pub fn scalar(n: usize, value: T) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = value.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.entries[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.n).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        Matrix { n, entries }
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|x| x.clone() * factor.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(T::to_f64)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|r| dot(self.row(r), x)).collect()
    }

    /// `self + p q^T`.
    pub fn rank_one_update(&self, p: &[T], q: &[T]) -> Self {
        assert_eq!(p.len(), self.n);
        assert_eq!(q.len(), self.n);
        let n = self.n;
        let entries = (0..n * n)
            .map(|k| self.entries[k].clone() + p[k / n].clone() * q[k % n].clone())
            .collect();
        Matrix { n, entries }
    }

    /// Max absolute row sum, as a float. Used to scale zero bands.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row(r).iter().map(|x| x.to_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Natural scale of `det(self)`: `max(1, ||self||_inf)^n`.
    pub fn det_scale(&self) -> f64 {
        self.inf_norm().max(1.0).powi(self.n as i32)
    }

    pub fn det(&self) -> T {
        T::determinant(self)
    }

    pub fn det_sign(&self) -> Sign {
        self.det().sign_in_band(self.det_scale())
    }

    /// Adjugate (transposed cofactor matrix), so that
    /// `self * adj(self) = det(self) * I` even when `self` is singular.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return Matrix::identity(1);
        }
        if n > COFACTOR_ADJUGATE_MAX_DIM {
            let det = self.det();
            if !det.sign_in_band(self.det_scale()).is_zero() {
                if let Some(inv) = self.inverse() {
                    return inv.scale(&det);
                }
            }
        }
        self.cofactor_adjugate()
    }

    fn cofactor_adjugate(&self) -> Self {
        let n = self.n;
        let mut adj = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                let c = if (i + j) % 2 == 0 { c } else { -c };
                adj.set(j, i, c);
            }
        }
        adj
    }

    /// The matrix with `row` and `col` deleted. `n` must be at least 2.
    pub fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let entries = (0..n)
            .filter(|&r| r != row)
            .flat_map(|r| (0..n).filter(move |&c| c != col).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        Matrix::new(n - 1, entries)
    }

    /// Characteristic polynomial `det(lambda I - self)` by the
    /// Faddeev-LeVerrier recurrence. Monic, degree `n`.
    pub fn char_poly(&self) -> Poly<T> {
        let n = self.n;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let mut m = Matrix::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            m = &(self * &m) + &Matrix::scalar(n, coeffs[n - k + 1].clone());
            let am = self * &m;
            coeffs[n - k] = -am.trace() * T::from_ratio(1, k as i64);
        }
        Poly::new(coeffs)
    }

    /// Solves `self x = rhs` by Gaussian elimination with partial pivoting.
    /// `None` if the matrix is singular (inside the zero band for floats).
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        let cols: Vec<Vec<T>> = vec![rhs.to_vec()];
        self.solve_many(&cols).map(|mut v| v.remove(0))
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let cols: Vec<Vec<T>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let sol = self.solve_many(&cols)?;
        let mut inv = Matrix::zeros(n);
        for (j, col) in sol.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        Some(inv)
    }

    fn solve_many(&self, rhs: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
        let n = self.n;
        let scale = self.inf_norm().max(f64::MIN_POSITIVE);
        let mut a = self.entries.clone();
        let mut b: Vec<Vec<T>> = rhs.to_vec();
        for k in 0..n {
            let pivot = (k..n).max_by(|&i, &j| {
                a[i * n + k]
                    .abs()
                    .partial_cmp(&a[j * n + k].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[pivot * n + k].sign_in_band(scale).is_zero() {
                return None;
            }
            if pivot != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot * n + c);
                }
                for col in b.iter_mut() {
                    col.swap(k, pivot);
                }
            }
            let p = a[k * n + k].clone();
            for i in k + 1..n {
                let factor = a[i * n + k].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in k + 1..n {
                    let v = a[i * n + c].clone() - factor.clone() * a[k * n + c].clone();
                    a[i * n + c] = v;
                }
                for col in b.iter_mut() {
                    let v = col[i].clone() - factor.clone() * col[k].clone();
                    col[i] = v;
                }
            }
        }
        for col in b.iter_mut() {
            for i in (0..n).rev() {
                let mut acc = col[i].clone();
                for c in i + 1..n {
                    acc = acc - a[i * n + c].clone() * col[c].clone();
                }
                col[i] = acc / a[i * n + i].clone();
            }
        }
        Some(b)
    }

    /// Entrywise equality, exact or to `rel` relative to `max(1, ||.||)`.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        if T::is_exact() {
            return self == other;
        }
        let scale = self.inf_norm().max(other.inf_norm()).max(1.0);
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= rel * scale)
    }
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// `e_k` of length `n`.
pub fn unit_vector<T: Scalar>(n: usize, k: usize) -> Vec<T> {
    (0..n).map(|i| if i == k { T::one() } else { T::zero() }).collect()
}

/// Checks the matrix determinant lemma
/// `det(a + p q^T) = det(a) + q^T adj(a) p`,
/// exactly or to `1e-9` relative on the float backend.
pub fn det_lemma_check<T: Scalar>(a: &Matrix<T>, p: &[T], q: &[T]) -> bool {
    let n = a.dim();
    if p.len() != n || q.len() != n {
        return false;
    }
    let lhs = a.rank_one_update(p, q).det();
    let rhs = a.det() + dot(q, &a.adjugate().mul_vec(p));
    if T::is_exact() {
        return lhs == rhs;
    }
    let scale = a.rank_one_update(p, q).det_scale().max(a.det_scale());
    (lhs.to_f64() - rhs.to_f64()).abs() <= 1e-9 * scale
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.n).map(|r| self.row(r))).finish()
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.n {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { n: self.n, entries }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { n: self.n, entries }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    let a = &self.entries[r * n + k];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * rhs.entries[k * n + c].clone();
                }
                entries.push(acc);
            }
        }
        Matrix { n, entries }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}
