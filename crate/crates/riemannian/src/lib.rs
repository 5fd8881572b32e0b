//! Riemannian optimization on the manifold of TT tensors with fixed ranks:
//! tangent-space projection, rounding-based retraction, a nonlinear CG
//! driver, the projector-splitting integrator step for low-rank matrices,
//! and the exponential-machines learner for multiplicative feature
//! interactions.

pub mod cg;
pub mod error;
pub mod exm;
pub mod splitting;
pub mod tangent;

pub use cg::{riemannian_cg, CgConfig, LineSearch};
pub use error::{Result, RiemannianError};
pub use exm::{exm_fit, ExmConfig, ExmLoss, ExmModel};
pub use splitting::{projector_splitting_step, LowRankMatrix};
pub use tangent::{retract, tangent_project, TangentSpace, TangentVector};
