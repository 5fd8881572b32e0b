use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error(transparent)]
    Core(#[from] ttkit_core::CoreError),

    #[error(transparent)]
    Tensorize(#[from] ttkit_tensorize::TensorizeError),

    #[error(transparent)]
    Solver(#[from] ttkit_solvers::SolverError),

    #[error(transparent)]
    Regression(#[from] ttkit_regression::RegressionError),

    #[error(transparent)]
    Riemannian(#[from] ttkit_riemannian::RiemannianError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
