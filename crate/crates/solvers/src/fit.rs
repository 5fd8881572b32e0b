//! Fixed-rank TT approximation of a dense tensor by alternating projections.
//!
//! With all other cores orthogonalized, the optimal core at the pivot is the
//! two-sided interface projection of the data tensor, so each site update is
//! an exact local least-squares step and the fit error is monotone.

use crate::error::Result;
use crate::report::SolveReport;
use ndarray::{Array2, Array3};
use std::time::Instant;
use ttkit_core::{DenseTensor, Scalar, TTTrain};

/// Best-effort rank-constrained fit: starts from TT-SVD truncated to the
/// target ranks and improves it by ALS sweeps.
pub fn tt_fit_als<T: Scalar>(
    y: &DenseTensor<T>,
    target_ranks: &[usize],
    sweeps: usize,
    x0: Option<TTTrain<T>>,
) -> Result<(TTTrain<T>, SolveReport)> {
    let start = Instant::now();
    let mut report = SolveReport::new("tt_fit_als");
    let max_rank = target_ranks.iter().copied().max().unwrap_or(1);
    let mut x = match x0 {
        Some(x) => x.round(T::zero(), max_rank)?,
        None => TTTrain::tt_svd(y, T::zero(), max_rank)?,
    };
    let n = x.order();
    let y_norm = y.fro_norm().to_f64().unwrap_or(1.0).max(1e-300);
    let v = y.to_vec();
    for sweep in 0..sweeps {
        for site in 0..n {
            x = x.orthogonalize(site)?;
            let left = x.left_interface(site);
            let right = x.right_interface(site);
            let (r0, i_sz, r1) = x.core(site).dim();
            // B = Lᵀ · Ỹ · Rᵀ with Ỹ the (left, i, right) matricization
            let rows_l = left.nrows();
            let cols_r = right.ncols();
            let mut core = Array3::zeros((r0, i_sz, r1));
            // t[a, (i, col)] = Σ_row L[row, a]·Y[(row, i, col)]
            let mut t = Array2::zeros((r0, i_sz * cols_r));
            for col in 0..cols_r {
                for i in 0..i_sz {
                    for a in 0..r0 {
                        let mut acc = T::zero();
                        for row in 0..rows_l {
                            acc = acc + left[[row, a]] * v[row + rows_l * (i + i_sz * col)];
                        }
                        t[[a, i + i_sz * col]] = acc;
                    }
                }
            }
            for a in 0..r0 {
                for i in 0..i_sz {
                    for b in 0..r1 {
                        let mut acc = T::zero();
                        for col in 0..cols_r {
                            acc = acc + t[[a, i + i_sz * col]] * right[[b, col]];
                        }
                        core[[a, i, b]] = acc;
                    }
                }
            }
            x.set_core(site, core)?;
        }
        // relative fit error after the sweep
        let err = x.contract_full().rel_err(y).to_f64().unwrap_or(f64::NAN);
        report.objective_trace.push(err * y_norm);
        report.residual_trace.push(err);
        report.sweeps = sweep + 1;
        if report.residual_trace.len() >= 2 {
            let len = report.residual_trace.len();
            if (report.residual_trace[len - 2] - err).abs() < 1e-14 {
                break;
            }
        }
    }
    report.final_residual = report.residual_trace.last().copied();
    report.final_ranks = x.ranks();
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((x, report))
}
