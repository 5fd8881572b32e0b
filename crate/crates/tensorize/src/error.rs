use thiserror::Error;

#[derive(Error, Debug)]
pub enum TensorizeError {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric overflow guard: {0}")]
    Overflow(String),

    #[error(transparent)]
    Core(#[from] ttkit_core::CoreError),
}

pub type Result<T> = std::result::Result<T, TensorizeError>;
