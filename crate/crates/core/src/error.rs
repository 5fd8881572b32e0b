use thiserror::Error;

/// Errors produced by TT-format construction and arithmetic.
#[derive(Error, Debug)]
pub enum CoreError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tensor is empty")]
    EmptyTensor,

    #[error("train is not orthogonalized at site {expected}: {reason}")]
    NotOrthogonal { expected: usize, reason: String },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<linfa_linalg::LinalgError> for CoreError {
    fn from(e: linfa_linalg::LinalgError) -> Self {
        CoreError::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
