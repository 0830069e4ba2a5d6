use std::fmt;

use thiserror::Error;

/// Which affine piece of the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    Left,
    Right,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Piece::Left => "A_L",
            Piece::Right => "A_R",
        })
    }
}

/// Genericity hypotheses under which the scenario classification holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    /// `rho^T b != 0`
    NonDegenerate,
    EigOneLeft,
    EigOneRight,
    EigOneCycle,
    EigMinusOneLeft,
    EigMinusOneRight,
}

impl fmt::Display for Hypothesis {
    /// Describes the violation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::NonDegenerate => "rho^T b = 0 (fixed points stay on the switching manifold)",
            Hypothesis::EigOneLeft => "1 is an eigenvalue of A_L",
            Hypothesis::EigOneRight => "1 is an eigenvalue of A_R",
            Hypothesis::EigOneCycle => "1 is an eigenvalue of A_R A_L",
            Hypothesis::EigMinusOneLeft => "-1 is an eigenvalue of A_L",
            Hypothesis::EigMinusOneRight => "-1 is an eigenvalue of A_R",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("map is discontinuous: A_R[{row}][{col}] differs from A_L[{row}][{col}]")]
    Discontinuous { row: usize, col: usize },

    #[error("1 is an eigenvalue of {0}")]
    EigOneDegenerate(Piece),

    #[error("-1 is an eigenvalue of {0}")]
    EigMinusOneDegenerate(Piece),

    #[error("1 is an eigenvalue of A_R A_L")]
    EigOneDegenerateRL,

    #[error("non-degeneracy violated: rho^T b = 0")]
    NondegeneracyViolated,

    #[error("determinant {0} vanishes")]
    DegenerateDeterminant(&'static str),

    #[error("polynomial vanishes at interval endpoint {at}")]
    DegenerateEndpoint { at: f64 },

    #[error("cannot count roots of the zero polynomial")]
    ZeroPolynomial,

    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("degenerate border collision: {}", list_hypotheses(.0))]
    Degenerate(Vec<Hypothesis>),

    /// A check that holds for every correct implementation failed. The
    /// witness is a complete, re-runnable description of the input.
    #[error("internal consistency check `{check}` failed\n{witness}")]
    Inconsistent { check: &'static str, witness: String },
}

fn list_hypotheses(list: &[Hypothesis]) -> String {
    list.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::EigOneDegenerate(_)
                | Error::EigMinusOneDegenerate(_)
                | Error::EigOneDegenerateRL
                | Error::NondegeneracyViolated
                | Error::DegenerateDeterminant(_)
                | Error::Degenerate(_)
        )
    }
}
