//! Tensor-train (TT/MPS) data structures and the algebraic primitives shared
//! by the solver and tensorization crates.
//!
//! A tensor train represents an `N`-way array through a chain of third-order
//! cores `G⁽ⁿ⁾` of shape `(Rₙ₋₁, Iₙ, Rₙ)` with boundary ranks `R₀ = R_N = 1`,
//!
//! ```text
//! x(i₁, i₂, …, i_N) = G⁽¹⁾[i₁] · G⁽²⁾[i₂] ⋯ G⁽ᴺ⁾[i_N]
//! ```
//!
//! where `G⁽ⁿ⁾[iₙ]` is the `Rₙ₋₁ × Rₙ` lateral slice of the `n`th core.
//! Linear (vector) indexing follows the column-major convention throughout:
//! the first tensor index runs fastest.
//!
//! Everything is generic over the scalar type through [`Scalar`]; concrete
//! aliases for the common precisions are exported at the crate root.

pub mod blocktt;
pub mod dense;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod tt;
pub mod ttop;

pub use blocktt::BlockTT;
pub use dense::DenseTensor;
pub use error::{CoreError, Result};
pub use rng::SplitMix64;
pub use scalar::Scalar;
pub use tt::TTTrain;
pub use ttop::TTOperator;

/// Double-precision tensor train.
pub type TTTrain64 = TTTrain<f64>;
/// Single-precision tensor train.
pub type TTTrain32 = TTTrain<f32>;
/// Double-precision TT operator (matrix product operator).
pub type TTOperator64 = TTOperator<f64>;
/// Single-precision TT operator.
pub type TTOperator32 = TTOperator<f32>;
/// Double-precision block tensor train.
pub type BlockTT64 = BlockTT<f64>;
/// Double-precision dense tensor.
pub type DenseTensor64 = DenseTensor<f64>;
