use thiserror::Error;

use crate::linalg::FactorizationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Garment,
    Pattern,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Garment => "garment",
            Side::Pattern => "pattern",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlattenError {
    #[error("degenerate {side} triangle {triangle}")]
    DegenerateTriangle { side: Side, triangle: usize },
    #[error("singular frame for triangle {triangle}")]
    SingularFrame { triangle: usize },
    #[error("topology mismatch: expected {expected} triangles, found {found}")]
    MismatchedTopology { expected: usize, found: usize },
    #[error("factorization failed: {0}")]
    SolverFailure(#[from] FactorizationError),
    #[error("non-finite value in solver input")]
    NonFiniteInput,
    #[error("invalid stitch problem: {0}")]
    InvalidProblem(String),
    #[error("boundary loop has {len} vertices, need at least 3")]
    TooShortBoundary { len: usize },
}

impl FlattenError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::DegenerateTriangle { .. } => "DegenerateTriangle",
            Self::SingularFrame { .. } => "SingularFrame",
            Self::MismatchedTopology { .. } => "MismatchedTopology",
            Self::SolverFailure(_) => "SolverFailure",
            Self::NonFiniteInput => "NonFiniteInput",
            Self::InvalidProblem(_) => "InvalidProblem",
            Self::TooShortBoundary { .. } => "TooShortBoundary",
        }
    }
}
