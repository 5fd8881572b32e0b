//! Multivariate TT regression: minimize `‖A X − B‖²_F + γ‖L X‖²_F` over an
//! operator-valued unknown `X` in MPO form. Setting `B` to the identity
//! yields a regularized approximate pseudo-inverse.
//!
//! The matrix unknown is flattened into a train over paired modes
//! `(jₙ, kₙ)`; the quadratic form then becomes an ordinary TT linear system
//! with the lifted operator `Â ⊗ I` acting on the pairs, and the one-site
//! engine from the linear solver applies unchanged.

use crate::error::{Result, SolverError};
use crate::linear::{amen_linear, LinearConfig};
use crate::report::SolveReport;
use ndarray::Array4;
use ttkit_core::{Scalar, TTOperator, TTTrain};

#[derive(Clone, Debug)]
pub struct RegressionConfig {
    pub sweeps: usize,
    pub tol: f64,
    pub max_rank: usize,
    pub enrich_rank: usize,
    pub seed: u64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self { sweeps: 40, tol: 1e-10, max_rank: 64, enrich_rank: 3, seed: 0 }
    }
}

/// Lifts an operator to act on paired modes `(row, passive)`:
/// `Â[(i, k), (j, k')] = A(i, j)·δ_{k,k'}`.
fn lift_operator<T: Scalar>(a: &TTOperator<T>, passive: &[usize]) -> Result<TTOperator<T>> {
    if a.order() != passive.len() {
        return Err(SolverError::ShapeMismatch("passive mode count mismatch".into()));
    }
    let mut cores = Vec::with_capacity(a.order());
    for (core, &ksz) in a.cores().iter().zip(passive.iter()) {
        let (r0, i, j, r1) = core.dim();
        let mut out = Array4::zeros((r0, i * ksz, j * ksz, r1));
        for x0 in 0..r0 {
            for ii in 0..i {
                for jj in 0..j {
                    for kk in 0..ksz {
                        for x1 in 0..r1 {
                            out[[x0, ii + i * kk, jj + j * kk, x1]] = core[[x0, ii, jj, x1]];
                        }
                    }
                }
            }
        }
        cores.push(out);
    }
    Ok(TTOperator::new(cores)?)
}

/// Solves `min ‖A X − B‖²_F + γ‖L X‖²_F` for `X` in MPO form.
///
/// `b` must have the same row sizes as `a` and carries the column sizes of
/// the unknown; `regularizer` defaults to the identity on `A`'s columns.
pub fn tt_regression<T: Scalar>(
    a: &TTOperator<T>,
    b: &TTOperator<T>,
    gamma: f64,
    regularizer: Option<&TTOperator<T>>,
    cfg: &RegressionConfig,
) -> Result<(TTOperator<T>, SolveReport)> {
    if a.row_sizes() != b.row_sizes() {
        return Err(SolverError::ShapeMismatch(format!(
            "A row sizes {:?} vs B row sizes {:?}",
            a.row_sizes(),
            b.row_sizes()
        )));
    }
    let col_sizes = b.col_sizes();
    // lifted system over paired modes
    let a_hat = lift_operator(a, &col_sizes)?;
    let b_train = b.to_merged_train();
    let l_hat = match regularizer {
        Some(l) => {
            if l.col_sizes() != a.col_sizes() {
                return Err(SolverError::ShapeMismatch(
                    "regularizer columns must match A columns".into(),
                ));
            }
            Some(lift_operator(l, &col_sizes)?)
        }
        None => None,
    };
    let x_sizes: Vec<usize> = a
        .col_sizes()
        .iter()
        .zip(col_sizes.iter())
        .map(|(&j, &k)| j * k)
        .collect();
    let x0 = TTTrain::<T>::random(&x_sizes, &vec![2; x_sizes.len().saturating_sub(1)], cfg.seed)?;
    let lin_cfg = LinearConfig {
        sweeps: cfg.sweeps,
        tol: cfg.tol,
        max_rank: cfg.max_rank,
        enrich_rank: cfg.enrich_rank,
        normal_equations: true,
        gamma,
    };
    let sol = amen_linear(&a_hat, &b_train, &x0, l_hat.as_ref(), &lin_cfg)?;
    let x = TTOperator::from_merged_train(&sol.x, &a.col_sizes(), &col_sizes)?;
    let mut report = sol.report;
    report.solver = "tt_regression".into();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttkit_core::{linalg, SplitMix64};

    #[test]
    fn identity_design_returns_rhs() {
        // A = I, γ = 0 → X = B
        let sizes = [2usize, 2, 2];
        let mut rng = SplitMix64::new(1);
        let b_dense = rng.normal_mat::<f64>(8, 8);
        let a = TTOperator::<f64>::identity(&sizes);
        let b = TTOperator::from_dense_matrix(&b_dense, &sizes, &sizes, 1e-14, usize::MAX)
            .unwrap();
        let (x, report) = tt_regression(&a, &b, 0.0, None, &RegressionConfig::default()).unwrap();
        let got = x.to_dense_matrix();
        let dev = (&got - &b_dense).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "max dev {dev}, report {:?}", report.residual_trace);
    }

    #[test]
    fn pseudo_inverse_of_random_matrix() {
        let sizes = [2usize, 2, 2];
        let mut rng = SplitMix64::new(2);
        let a_dense = rng.normal_mat::<f64>(8, 8);
        let a = TTOperator::from_dense_matrix(&a_dense, &sizes, &sizes, 1e-14, usize::MAX)
            .unwrap();
        let b = TTOperator::<f64>::identity(&sizes);
        let cfg = RegressionConfig { max_rank: 64, tol: 1e-12, ..Default::default() };
        let (x, _report) = tt_regression(&a, &b, 1e-10, None, &cfg).unwrap();
        let got = x.to_dense_matrix();
        let pinv = linalg::pinv(&a_dense.view(), 1e-12).unwrap();
        let dev = (&got - &pinv).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "max dev {dev}");
    }

    #[test]
    fn huge_ridge_drives_solution_to_zero() {
        let sizes = [2usize, 2];
        let mut rng = SplitMix64::new(3);
        let a_dense = rng.normal_mat::<f64>(4, 4);
        let a = TTOperator::from_dense_matrix(&a_dense, &sizes, &sizes, 1e-14, usize::MAX)
            .unwrap();
        let b = TTOperator::<f64>::identity(&sizes);
        let (x, _) = tt_regression(&a, &b, 1e12, None, &RegressionConfig::default()).unwrap();
        let norm = x.to_dense_matrix().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-6, "‖X‖ = {norm}");
    }
}
