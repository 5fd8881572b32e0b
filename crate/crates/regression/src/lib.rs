//! Supervised learning with tensor-valued data: multilinear Tucker
//! regression, higher-order low-rank regression (plain and kernelized),
//! higher-order partial least squares with its rank-one special case, the
//! least-squares support tensor machine, and kernel functions for tensors.

pub mod error;
pub mod holrr;
pub mod hopls;
pub mod kernel;
pub mod lsstm;
pub mod mtr;

pub use error::{RegressionError, Result};
pub use holrr::{holrr_fit, kholrr_fit, HolrrModel};
pub use hopls::{hopls_fit, n_way_pls, HoplsModel, NwayPlsModel};
pub use kernel::{kernel_matrix, kernel_value, KernelConfig};
pub use lsstm::{lsstm_fit, LsStmModel};
pub use mtr::{mtr_fit, MtrModel};
