mod common;

use bcb::problem::to_json;
use bcb::{classify, counts, parse_problem, Backend, PwlMap, Rational, Scalar};
use common::{map, q};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn float_backend_classifies_like_rational(m in map(5)) {
        let exact = classify(&m);
        let float = classify(&m.to_f64());
        match (exact, float) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.scenario, b.scenario);
                prop_assert_eq!(a.companion, b.companion);
                prop_assert_eq!(a.census_negative, b.census_negative);
                prop_assert_eq!(a.census_positive, b.census_positive);
            }
            // Float data that is only near a degenerate map may be refused.
            (Ok(_), Err(e)) => prop_assert!(e.is_degeneracy(), "{e}"),
            (Err(e), _) => prop_assert!(e.is_degeneracy(), "{e}"),
        }
    }

    #[test]
    fn float_count_parities_match_exact_ones(m in map(5)) {
        // Rounding can split a repeated real eigenvalue into a complex pair,
        // which changes a count by two but never its parity.
        let f = m.to_f64();
        let (a, b) = (counts(m.left(), m.right()), counts(f.left(), f.right()));
        if !a.degenerate.any() && !b.degenerate.any() {
            let parities = |c: &bcb::SpectralCounts| {
                [c.sigma_l_plus, c.sigma_l_minus, c.sigma_r_plus, c.sigma_r_minus, c.sigma_lr_plus, c.sigma_ll_plus]
                    .map(|v| v % 2)
            };
            prop_assert_eq!(parities(&a), parities(&b));
        }
    }

    #[test]
    fn problem_files_round_trip(m in map(5)) {
        let text = to_json(&m);
        prop_assert_eq!(parse_problem::<Rational>(&text).unwrap(), m.clone());
        let f = m.to_f64();
        prop_assert_eq!(parse_problem::<f64>(&to_json(&f)).unwrap(), f);
    }
}

#[test]
fn backend_names() {
    assert_eq!("rational".parse::<Backend>().unwrap(), Backend::Rational);
    assert_eq!("float".parse::<Backend>().unwrap(), Backend::Float);
    assert!("double".parse::<Backend>().is_err());
}

#[test]
fn decimal_and_fraction_entries_agree() {
    let a = parse_problem::<Rational>(r#"{"dimension":1,"A_L":[[0.4]],"A_R":[[-1.5]],"b":[1]}"#).unwrap();
    let b = parse_problem::<Rational>(r#"{"dimension":1,"A_L":[["2/5"]],"xi":["-19/10"],"b":["1"]}"#).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, PwlMap::one_dimensional(q(2, 5), q(-3, 2), q(1, 1)));
    assert_eq!(Scalar::to_f64(&a.rho_b()), 1.0);
}
