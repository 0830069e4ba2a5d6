//! Border-collision bifurcations of continuous piecewise-linear maps.
//!
//! Given `x' = A_L x + b mu` for `s <= 0` and `A_R x + b mu` for `s >= 0`
//! (with `s` the first coordinate), this crate counts the real eigenvalues
//! of the pieces beyond `+-1`, classifies what happens to the fixed points
//! and the LR-cycle as `mu` crosses zero, and cross-checks the prediction by
//! iterating the map.
//!
//! ```
//! use bcb::{classify, PwlMap, Rational, Scalar, Scenario};
//!
//! let q = Rational::from_ratio;
//! let map = PwlMap::one_dimensional(q(2, 5), q(-3, 2), q(1, 1));
//! let c = classify(&map).unwrap();
//! assert_eq!(c.scenario, Scenario::PersistenceWithCycle);
//! ```

pub mod classify;
pub mod error;
mod intpoly;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod problem;
pub mod scalar;
pub mod simulate;
pub mod spectral;
pub mod sweep;
pub mod verify;

pub use classify::{census, classify, CensusEntry, Classification, CycleCompanion, Scenario};
pub use error::{Error, Hypothesis, Piece};
pub use matrix::Matrix;
pub use model::{
    fixed_points, llr_admissible_one_side, lr_cycle, Admissibility, BranchReport, MuSide, Object, PwlMap,
};
pub use poly::Poly;
pub use problem::{parse_problem, ProblemError};
pub use scalar::{Backend, Rational, Scalar, Sign};
pub use simulate::{detect_attractor, step, DetectOptions, Orbit, Outcome};
pub use spectral::{counts, spectral_radius, SpectralCounts, Stability};
pub use verify::{SampleSpec, VerifyReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/normal-form.md")]
    mod normal_form {}
    #[doc = include_str!("../../../book/src/eigenvalue-counts.md")]
    mod eigenvalue_counts {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
