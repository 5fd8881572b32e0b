use crate::report::SolveReport;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum SolverError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("local problem dimension {dim} exceeds the dense-solve cap {cap}")]
    LocalDimTooLarge { dim: usize, cap: usize },

    #[error("solver diverged: {reason}")]
    Diverged { reason: String, report: Box<SolveReport> },

    #[error(transparent)]
    Core(#[from] ttkit_core::CoreError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
