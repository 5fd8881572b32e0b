use thiserror::Error;

#[derive(Error, Debug)]
pub enum RegressionError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error(transparent)]
    Core(#[from] ttkit_core::CoreError),

    #[error(transparent)]
    Solver(#[from] ttkit_solvers::SolverError),
}

pub type Result<T> = std::result::Result<T, RegressionError>;
