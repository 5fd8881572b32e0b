//! Library backing the `ttkit` binary: experiment drivers, fixtures,
//! scoring, and small CSV/JSON helpers. The command-line layer in `main.rs`
//! stays a thin argument-parsing shell over these functions so integration
//! tests can drive everything in-process.

pub mod blind_exp;
pub mod config;
pub mod csvio;
pub mod error;
pub mod fixtures;
pub mod pool;
pub mod sae;
pub mod sinusoid_exp;
pub mod tasks;

pub use error::{CliError, Result};
