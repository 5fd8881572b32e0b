//! JSON experiment and solver configurations. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_sweeps() -> usize {
    50
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_rank() -> usize {
    64
}

/// Sinusoid-separation experiment.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationConfig {
    /// Number of damped sinusoid components.
    pub components: usize,
    /// Component frequencies in Hz (defaults to 10, 12, 14, …).
    #[serde(default)]
    pub freqs_hz: Option<Vec<f64>>,
    /// Sampling frequency (defaults to 10 × the highest component).
    #[serde(default)]
    pub sampling_hz: Option<f64>,
    /// Signal length exponent: L = 2^d · P².
    pub length_exponent: usize,
    /// Signal-to-noise ratio in dB; `None` means noiseless.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// "folded" (default) or "toeplitz7" (7th-order Toeplitz tensorization
    /// of a 66-sample prefix, folded to quantized modes).
    #[serde(default)]
    pub tensorization: Option<String>,
    /// Outer demixing rounds.
    #[serde(default)]
    pub rounds: Option<usize>,
}

/// Blind-identification experiment.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BlindIdentConfig {
    /// Number of sources mixed into two channels.
    pub sources: usize,
    /// Derivative tensor orders to evaluate (each in 3..=8).
    pub orders: Vec<usize>,
    #[serde(default)]
    pub snr_db: Option<f64>,
    /// Samples; defaults to 100·2^R.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// CP iterations for the factor extraction.
    #[serde(default)]
    pub cp_iters: Option<usize>,
    /// Replace sampled sources by one copy of every ±1 pattern, making the
    /// sample characteristic function exact (noise is then ignored).
    #[serde(default)]
    pub exact_statistics: bool,
    /// Number of derivative-tensor stacks per seed, each with a fresh
    /// collinearity-controlled random point (the per-seed score averages
    /// over them).
    #[serde(default)]
    pub stacks: Option<usize>,
    /// CP restarts per stack; the best-fit decomposition is kept.
    #[serde(default)]
    pub cp_restarts: Option<usize>,
    /// Scale applied to the processing points.
    #[serde(default)]
    pub point_scale: Option<f64>,
}

/// Linear-system / eigenproblem / completion / regression task settings.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverTaskConfig {
    pub solver: String,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_rank")]
    pub max_rank: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Problem source: a named fixture or TT1F files.
    #[serde(default)]
    pub fixture: Option<FixtureConfig>,
    #[serde(default)]
    pub operator_file: Option<String>,
    #[serde(default)]
    pub rhs_file: Option<String>,
    /// Eigensolver settings.
    #[serde(default)]
    pub num_eigenpairs: Option<usize>,
    #[serde(default)]
    pub enrich_rank: Option<usize>,
    /// Tikhonov weight for ridge solves.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Completion settings.
    #[serde(default)]
    pub mode_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub target_ranks: Option<Vec<usize>>,
    #[serde(default)]
    pub samples_file: Option<String>,
    /// Regression settings.
    #[serde(default)]
    pub dataset_file: Option<String>,
    #[serde(default)]
    pub ranks: Option<Vec<usize>>,
}

/// Built-in problem generators.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum FixtureConfig {
    /// Tridiagonal (−1, 2, −1) Laplacian of dimension 2^d in quantized form.
    QttLaplacian { size_log2: usize },
    /// Identity operator over the given mode sizes.
    Identity { mode_sizes: Vec<usize> },
    /// Random SPD operator over quantized modes (seeded).
    RandomSpd { size_log2: usize, seed: u64 },
    /// Random low-rank train observed on a uniform sample (completion).
    LowRankSample {
        mode_sizes: Vec<usize>,
        ranks: Vec<usize>,
        fraction: f64,
        seed: u64,
    },
    /// Synthetic low-rank regression dataset (`holrr` demo).
    HolrrDemo { samples: usize, seed: u64 },
}

pub fn read_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> crate::Result<T> {
    let text = std::fs::read_to_string(path)?;
    let parsed = serde_json::from_str(&text)?;
    Ok(parsed)
}
