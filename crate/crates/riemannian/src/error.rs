use thiserror::Error;

#[derive(Error, Debug)]
pub enum RiemannianError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank chain degenerate: {0}")]
    DegenerateRanks(String),

    #[error(transparent)]
    Core(#[from] ttkit_core::CoreError),
}

pub type Result<T> = std::result::Result<T, RiemannianError>;
