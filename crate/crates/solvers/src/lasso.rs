//! Sparse recovery in TT format by iteratively reweighted least squares.
//!
//! The `ℓ_q` penalty (`0 < q ≤ 1`) is replaced by the weighted `ℓ₂` norm
//! `xᵀW(x)x` with `w_j = (x_j² + ε²)^{q/2−1}`; each outer iteration holds
//! the weights fixed and solves the normal equations `(AᵀA + γW)x = Aᵀb`
//! with the one-site engine, approximating the diagonal weight train at
//! rank one.

use crate::error::{Result, SolverError};
use crate::linear::{amen_linear, LinearConfig, LinearSolution};
use crate::report::SolveReport;
use std::time::Instant;
use ttkit_core::{DenseTensor, Scalar, TTOperator, TTTrain};

/// Floor for the smoothing constant ε.
pub const EPSILON_FLOOR: f64 = 1e-8;

/// Largest total dimension for which the dense weight evaluation is allowed.
const DENSE_WEIGHT_CAP: usize = 1 << 18;

#[derive(Clone, Debug)]
pub struct LassoConfig {
    /// Outer reweighting iterations.
    pub iters: usize,
    /// Inner linear-solver settings.
    pub inner: LinearConfig,
    /// Smoothing constant (clamped to [`EPSILON_FLOOR`]).
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            iters: 15,
            inner: LinearConfig { sweeps: 8, tol: 1e-12, ..Default::default() },
            epsilon: 1e-4,
            seed: 0,
        }
    }
}

/// Smoothed penalty `Σ (x_j² + ε²)^{q/2}` evaluated densely.
fn penalty<T: Scalar>(x: &TTTrain<T>, q: f64, eps: f64) -> f64 {
    x.contract_full()
        .to_vec()
        .iter()
        .map(|v| {
            let v = v.to_f64().unwrap_or(0.0);
            (v * v + eps * eps).powf(q / 2.0)
        })
        .sum()
}

/// Minimizes `‖Ax − b‖² + γ‖x‖_q^q` (smoothed) over TT vectors.
pub fn lasso_irls<T: Scalar>(
    a: &TTOperator<T>,
    b: &TTTrain<T>,
    gamma: f64,
    q: f64,
    cfg: &LassoConfig,
) -> Result<(TTTrain<T>, SolveReport)> {
    let start = Instant::now();
    if !(0.0 < q && q <= 1.0) {
        return Err(SolverError::InvalidArgument(format!(
            "exponent q = {q} outside (0, 1]"
        )));
    }
    if gamma == 0.0 {
        // no penalty: plain least squares through the normal equations
        let sizes = a.col_sizes();
        let x0 = TTTrain::<T>::random(&sizes, &vec![2; sizes.len().saturating_sub(1)], cfg.seed)?;
        let lin_cfg = LinearConfig { normal_equations: true, ..cfg.inner.clone() };
        let LinearSolution { x, mut report } = amen_linear(a, b, &x0, None, &lin_cfg)?;
        report.solver = "lasso_irls".into();
        return Ok((x, report));
    }
    let total: usize = a.col_sizes().iter().product();
    if total > DENSE_WEIGHT_CAP {
        return Err(SolverError::InvalidArgument(format!(
            "total dimension {total} exceeds the dense weight-evaluation cap {DENSE_WEIGHT_CAP}"
        )));
    }
    let eps = cfg.epsilon.max(EPSILON_FLOOR);
    let sizes = a.col_sizes();
    let mut report = SolveReport::new("lasso_irls");
    let mut x =
        TTTrain::<T>::random(&sizes, &vec![2; sizes.len().saturating_sub(1)], cfg.seed)?;

    // warm start from the unpenalized least-squares solution
    let warm_cfg = LinearConfig { normal_equations: true, ..cfg.inner.clone() };
    x = amen_linear(a, b, &x, None, &warm_cfg)?.x;

    let residual_sq = |x: &TTTrain<T>| -> Result<f64> {
        let ax = a.apply(x)?.round(T::from_f64_c(1e-13), usize::MAX)?;
        let r = ax.sub(b)?.round(T::from_f64_c(1e-13), usize::MAX)?;
        let n = r.norm().to_f64().unwrap_or(f64::NAN);
        Ok(n * n)
    };

    for iter in 0..cfg.iters {
        // weight train, preferring the rank-one form; when the weights are
        // too spiky for a separable approximation (entrywise sparsity), the
        // rank escalates so the reweighted step stays faithful
        let dense_x = x.contract_full().to_vec();
        let weights: Vec<T> = dense_x
            .iter()
            .map(|v| {
                let v = v.to_f64().unwrap_or(0.0);
                T::from_f64_c((v * v + eps * eps).powf(q / 2.0 - 1.0))
            })
            .collect();
        let w_dense = DenseTensor::from_vec(&sizes, weights).map_err(ttkit_core::CoreError::from)?;
        let mut w_train = TTTrain::tt_svd(&w_dense, T::zero(), 1)?;
        if w_train.contract_full().rel_err(&w_dense) > T::from_f64_c(0.01) {
            if !report.warnings.iter().any(|w| w.contains("weight rank")) {
                report
                    .warnings
                    .push("rank-one weight approximation poor; weight rank escalated".into());
            }
            w_train = TTTrain::tt_svd(&w_dense, T::from_f64_c(1e-12), 64)?;
        }
        let w_op = TTOperator::diag(&w_train);

        // solve (AᵀA + γ·W) x = Aᵀb through the ridge path with L = √W:
        // the engine adds γ·LᵀL, so pass W as composed regularizer directly
        let lin_cfg = LinearConfig {
            normal_equations: true,
            gamma,
            ..cfg.inner.clone()
        };
        let sol = amen_linear(a, b, &x, Some(&sqrt_diag(&w_op)?), &lin_cfg)?;
        x = sol.x;
        let obj = residual_sq(&x)? + gamma * penalty(&x, q, eps);
        report.objective_trace.push(obj);
        report.sweeps = iter + 1;
        if report.objective_trace.len() >= 2 {
            let len = report.objective_trace.len();
            let prev = report.objective_trace[len - 2];
            if (prev - obj).abs() <= 1e-12 * prev.abs().max(1.0) {
                report.converged = true;
                break;
            }
        }
    }
    report.final_residual = Some(residual_sq(&x)?.sqrt());
    report.final_ranks = x.ranks();
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((x, report))
}

/// Elementwise square root of a nonnegative diagonal operator, so that the
/// ridge term `γ‖Lx‖²` reproduces `γ·xᵀWx`.
fn sqrt_diag<T: Scalar>(w: &TTOperator<T>) -> Result<TTOperator<T>> {
    // the rank-one diagonal train has nonnegative entries up to sign gauge;
    // take the absolute value before the square root
    let mut cores = Vec::with_capacity(w.order());
    for core in w.cores() {
        let (r0, i, _, r1) = core.dim();
        if r0 != 1 || r1 != 1 {
            // general case: densify the diagonal (small by construction)
            return sqrt_diag_dense(w);
        }
        let mut out = core.clone();
        for ii in 0..i {
            // |·| is multiplicative across cores, so the lifted train squares
            // back to the absolute value of the rank-one weight
            out[[0, ii, ii, 0]] = core[[0, ii, ii, 0]].abs().sqrt();
        }
        cores.push(out);
    }
    Ok(TTOperator::new(cores)?)
}

fn sqrt_diag_dense<T: Scalar>(w: &TTOperator<T>) -> Result<TTOperator<T>> {
    let d = w.to_dense_matrix();
    let mut s = d.clone();
    for v in s.iter_mut() {
        *v = v.abs().sqrt();
    }
    Ok(TTOperator::from_dense_matrix(
        &s,
        &w.row_sizes(),
        &w.col_sizes(),
        T::from_f64_c(1e-14),
        usize::MAX,
    )?)
}
