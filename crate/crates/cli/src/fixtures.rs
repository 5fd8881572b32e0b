//! Built-in problem generators shared by the solver commands and tests.

use crate::config::FixtureConfig;
use crate::error::{CliError, Result};
use ndarray::Array2;
use ttkit_core::{DenseTensor, SplitMix64, TTOperator, TTTrain};
use ttkit_solvers::SamplingSet;

/// Tridiagonal (−1, 2, −1) Laplacian of dimension `2^d` as a quantized MPO.
pub fn qtt_laplacian(size_log2: usize) -> Result<TTOperator<f64>> {
    let n = 1usize << size_log2;
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = 2.0;
        if i + 1 < n {
            m[[i, i + 1]] = -1.0;
            m[[i + 1, i]] = -1.0;
        }
    }
    let sizes = vec![2usize; size_log2];
    Ok(TTOperator::from_dense_matrix(&m, &sizes, &sizes, 1e-13, usize::MAX)?)
}

/// Analytic smallest eigenvalue of that Laplacian.
pub fn laplacian_lambda_min(size_log2: usize) -> f64 {
    let n = (1usize << size_log2) as f64;
    2.0 - 2.0 * (std::f64::consts::PI / (n + 1.0)).cos()
}

pub fn random_spd(size_log2: usize, seed: u64) -> Result<TTOperator<f64>> {
    let n = 1usize << size_log2;
    let mut rng = SplitMix64::new(seed);
    let raw: Array2<f64> = rng.normal_mat(n, n);
    let spd = raw.dot(&raw.t()) + (n as f64) * Array2::<f64>::eye(n);
    let sizes = vec![2usize; size_log2];
    Ok(TTOperator::from_dense_matrix(&spd, &sizes, &sizes, 1e-13, usize::MAX)?)
}

pub fn operator_from_fixture(fix: &FixtureConfig) -> Result<TTOperator<f64>> {
    match fix {
        FixtureConfig::QttLaplacian { size_log2 } => qtt_laplacian(*size_log2),
        FixtureConfig::Identity { mode_sizes } => Ok(TTOperator::identity(mode_sizes)),
        FixtureConfig::RandomSpd { size_log2, seed } => random_spd(*size_log2, *seed),
        other => Err(CliError::Config(format!(
            "fixture {other:?} does not define an operator"
        ))),
    }
}

/// Low-rank completion instance: ground truth, observations, held-out truth.
pub struct CompletionFixture {
    pub truth: TTTrain<f64>,
    pub omega: SamplingSet<f64>,
}

pub fn completion_fixture(
    mode_sizes: &[usize],
    ranks: &[usize],
    fraction: f64,
    seed: u64,
) -> Result<CompletionFixture> {
    let truth = TTTrain::<f64>::random(mode_sizes, ranks, seed)?;
    let dense = truth.contract_full();
    let mut rng = SplitMix64::new(seed ^ 0xabcdef);
    let total: usize = mode_sizes.iter().product();
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for flat in 0..total {
        if rng.next_f64() >= fraction {
            continue;
        }
        let mut rem = flat;
        let idx: Vec<usize> = mode_sizes
            .iter()
            .map(|&s| {
                let i = rem % s;
                rem /= s;
                i
            })
            .collect();
        values.push(dense.get(&idx));
        indices.push(idx);
    }
    if indices.is_empty() {
        return Err(CliError::Experiment("empty sample draw; raise the fraction".into()));
    }
    let omega = SamplingSet::new(mode_sizes, indices, values)?;
    Ok(CompletionFixture { truth, omega })
}

/// Synthetic low-rank regression dataset: vector inputs, matrix responses.
pub struct HolrrDemo {
    pub x: Array2<f64>,
    pub y: DenseTensor<f64>,
    pub x_test: Array2<f64>,
    pub y_test: DenseTensor<f64>,
    pub ranks: Vec<usize>,
    pub gamma: f64,
}

pub fn holrr_demo(samples: usize, seed: u64) -> Result<HolrrDemo> {
    let mut rng = SplitMix64::new(seed);
    let i0 = 5;
    let out = [3usize, 3];
    let core = DenseTensor::<f64>::random_normal(&[2, 2, 2], seed ^ 1);
    let f0: Array2<f64> = rng.normal_mat(i0, 2);
    let f1: Array2<f64> = rng.normal_mat(out[0], 2);
    let f2: Array2<f64> = rng.normal_mat(out[1], 2);
    let w = core
        .mode_product(&f0, 0)?
        .mode_product(&f1, 1)?
        .mode_product(&f2, 2)?;
    let make = |rng: &mut SplitMix64, m: usize| -> Result<(Array2<f64>, DenseTensor<f64>)> {
        let x: Array2<f64> = rng.normal_mat(m, i0);
        let clean = w.mode_product(&x, 0)?;
        let noise = DenseTensor::<f64>::random_normal(clean.mode_sizes(), rng.next_u64())
            .scale(0.01);
        Ok((x, clean.add(&noise)?))
    };
    let (x, y) = make(&mut rng, samples)?;
    let (x_test, y_test) = make(&mut rng, samples / 2)?;
    Ok(HolrrDemo { x, y, x_test, y_test, ranks: vec![2, 2, 2], gamma: 1e-6 })
}
