//! The determinant test for an admissible LLR-cycle against the cycle
//! itself, found by solving the three one-step equations together.

mod common;

use bcb::{llr_admissible_one_side, PwlMap, Rational, Scalar, Sign};
use common::{map, periodic_orbit, q};
use proptest::prelude::*;

/// `Some(true)` if the LLR orbit at `mu = 1` has signs `(-, -, +)` or
/// `(+, +, -)`, so that it is admissible for exactly one sign of `mu`.
/// `None` when the orbit is not unique or touches the switching manifold.
fn brute_force(map: &PwlMap<Rational>) -> Option<bool> {
    let orbit = periodic_orbit(map, &[false, false, true])?;
    let signs: Vec<Sign> = orbit.iter().map(|x| x[0].sign_in_band(1.0)).collect();
    if signs.iter().any(|s| s.is_zero()) {
        return None;
    }
    Some(signs[0] == signs[1] && signs[1] != signs[2])
}

#[test]
fn one_dimensional_spot_checks() {
    for (a_l, a_r, expected) in [(q(9, 10), q(-3, 1), true), (q(2, 5), q(-3, 2), false), (q(0, 1), q(0, 1), false)] {
        let map = PwlMap::one_dimensional(a_l, a_r, q(1, 1));
        assert_eq!(llr_admissible_one_side(&map).unwrap(), expected);
        assert_eq!(brute_force(&map), Some(expected));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn determinant_test_matches_the_cycle(m in map(4)) {
        if m.rho_b() == q(0, 1) {
            return Ok(());
        }
        if let (Ok(predicted), Some(actual)) = (llr_admissible_one_side(&m), brute_force(&m)) {
            prop_assert_eq!(predicted, actual);
        }
    }
}
