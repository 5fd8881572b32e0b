//! Sweeping optimizers over TT networks: symmetric eigensolvers (ALS, MALS,
//! AMEn-enriched), linear systems and ridge regression, tensor completion on
//! a sampling set, iteratively reweighted LASSO, plus the dense CP-ALS and
//! Tucker-HOOI decompositions used by the tensorization pipelines.

pub mod cache;
pub mod complete;
pub mod cp;
pub mod error;
pub mod evd;
pub mod fit;
pub mod lasso;
pub mod linear;
pub mod regression;
pub mod report;
pub mod tucker;

pub use cache::ContractionCache;
pub use complete::{tt_complete, CompletionConfig, SamplingSet};
pub use cp::{cp_als, CpConfig, CpDecomposition};
pub use error::{Result, SolverError};
pub use evd::{als_evd, evamen, mals_evd, EvdConfig, EvdResult};
pub use fit::tt_fit_als;
pub use lasso::{lasso_irls, LassoConfig};
pub use linear::{amen_linear, LinearConfig, LinearSolution};
pub use regression::{tt_regression, RegressionConfig};
pub use report::SolveReport;
pub use tucker::{tucker_hooi, TuckerDecomposition};
