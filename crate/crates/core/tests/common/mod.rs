#![allow(dead_code)]

use bcb::{Matrix, PwlMap, Rational, Scalar};
use proptest::prelude::*;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// Entries `p/d` with `|p| <= 3`, `1 <= d <= 3`.
pub fn entry() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=3).prop_map(|(p, d)| q(p, d))
}

pub fn entries(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(entry(), len)
}

/// A random map in `(A_L, xi, b)` form of dimension `1..=max_dim`.
pub fn map(max_dim: usize) -> impl Strategy<Value = PwlMap<Rational>> {
    (1..=max_dim).prop_flat_map(|n| {
        (entries(n * n), entries(n), entries(n))
            .prop_map(move |(l, xi, b)| PwlMap::new(Matrix::new(n, l), xi, b).unwrap())
    })
}

/// Plain Gaussian elimination over the rationals, `None` if singular.
#[allow(clippy::needless_range_loop)]
pub fn gauss_solve(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != q(0, 1))?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] != q(0, 1) {
                let factor = a[r][col].clone() / a[col][col].clone();
                for c in col..n {
                    let v = a[col][c].clone() * factor.clone();
                    a[r][c] -= v;
                }
                let v = rhs[col].clone() * factor;
                rhs[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| rhs[i].clone() / a[i][i].clone()).collect())
}

/// Solves for a periodic orbit that visits the pieces in `pattern` order
/// (`true` for the right piece) at `mu = 1`, by stacking the `k` one-step
/// equations into a single `k N` system.
pub fn periodic_orbit(map: &PwlMap<Rational>, pattern: &[bool]) -> Option<Vec<Vec<Rational>>> {
    let n = map.dim();
    let k = pattern.len();
    let size = k * n;
    let mut a = vec![vec![q(0, 1); size]; size];
    let mut rhs = vec![q(0, 1); size];
    // x_{j+1} - A_j x_j = b
    for j in 0..k {
        let next = (j + 1) % k;
        let piece = if pattern[j] { map.right() } else { map.left() };
        for i in 0..n {
            a[next * n + i][next * n + i] += q(1, 1);
            for c in 0..n {
                a[next * n + i][j * n + c] -= piece.get(i, c).clone();
            }
            rhs[next * n + i] = map.b()[i].clone();
        }
    }
    let x = gauss_solve(a, rhs)?;
    Some(x.chunks(n).map(<[Rational]>::to_vec).collect())
}
