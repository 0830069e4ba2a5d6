//! Changing coordinates by any `T` with first row `e1^T` keeps the switching
//! manifold in place, so every count and every first component must survive.

mod common;

use bcb::{classify, counts, fixed_points, lr_cycle, Matrix, PwlMap, Rational};
use common::{entries, map, q};
use proptest::prelude::*;

/// Unit lower-triangular, then rows 2..N scaled: the first row stays `e1^T`.
fn transform(n: usize, lower: &[Rational], scales: &[Rational]) -> Matrix<Rational> {
    let mut t = Matrix::identity(n);
    let mut k = 0;
    for i in 1..n {
        for j in 0..i {
            t.set(i, j, lower[k].clone());
            k += 1;
        }
    }
    for i in 1..n {
        for j in 0..n {
            let v = t.get(i, j).clone() * scales[i - 1].clone();
            t.set(i, j, v);
        }
    }
    t
}

fn conjugate(map: &PwlMap<Rational>, t: &Matrix<Rational>) -> PwlMap<Rational> {
    let inv = t.inverse().expect("invertible");
    let left = &(&inv * map.left()) * t;
    PwlMap::new(left, inv.mul_vec(map.xi()), inv.mul_vec(map.b())).unwrap()
}

fn nonzero_entries(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((1i64..=3, 1i64..=3, any::<bool>()), len)
        .prop_map(|v| v.into_iter().map(|(p, d, neg)| q(if neg { -p } else { p }, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_components_survive_coordinate_changes(
        (m, lower, scales) in map(4).prop_flat_map(|m| {
            let n = m.dim();
            (Just(m), entries(n * (n - 1) / 2), nonzero_entries(n - 1))
        })
    ) {
        let t = transform(m.dim(), &lower, &scales);
        let other = conjugate(&m, &t);
        prop_assert_eq!(counts(m.left(), m.right()), counts(other.left(), other.right()));
        prop_assert_eq!(m.rho_b(), other.rho_b());
        if let (Ok((l1, r1)), Ok((l2, r2))) = (fixed_points(&m), fixed_points(&other)) {
            prop_assert_eq!(l1.first_components, l2.first_components);
            prop_assert_eq!(r1.first_components, r2.first_components);
        }
        if let (Ok(c1), Ok(c2)) = (lr_cycle(&m), lr_cycle(&other)) {
            prop_assert_eq!(c1.first_components, c2.first_components);
        }
        match (classify(&m), classify(&other)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.scenario, b.scenario);
                prop_assert_eq!(a.census_negative, b.census_negative);
                prop_assert_eq!(a.census_positive, b.census_positive);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one side classified: {:?} / {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn reversing_b_swaps_the_mu_sides(m in map(4)) {
        let flipped = PwlMap::new(
            m.left().clone(),
            m.xi().to_vec(),
            m.b().iter().map(|v| -v.clone()).collect(),
        ).unwrap();
        if let (Ok(a), Ok(b)) = (classify(&m), classify(&flipped)) {
            prop_assert_eq!(a.scenario, b.scenario);
            prop_assert_eq!(&a.census_negative, &b.census_positive);
            prop_assert_eq!(&a.census_positive, &b.census_negative);
        }
    }
}
