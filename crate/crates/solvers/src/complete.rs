//! TT completion: fit a fixed-rank train to a sparse set of observed
//! entries by alternating slice-wise least squares, with a stepwise
//! rank-increase schedule starting from rank one.

use crate::cache::check_local_dim;
use crate::error::{Result, SolverError};
use crate::report::SolveReport;
use ndarray::{Array1, Array2, Array3};
use std::collections::HashSet;
use std::time::Instant;
use ttkit_core::{linalg, Scalar, SplitMix64, TTTrain};

/// Observed entries: multi-indices and values.
#[derive(Clone, Debug)]
pub struct SamplingSet<T> {
    pub indices: Vec<Vec<usize>>,
    pub values: Vec<T>,
}

impl<T: Scalar> SamplingSet<T> {
    pub fn new(mode_sizes: &[usize], indices: Vec<Vec<usize>>, values: Vec<T>) -> Result<Self> {
        if indices.is_empty() {
            return Err(SolverError::InvalidArgument("empty sampling set".into()));
        }
        if indices.len() != values.len() {
            return Err(SolverError::ShapeMismatch(
                "index and value counts differ".into(),
            ));
        }
        let mut seen = HashSet::new();
        for idx in &indices {
            if idx.len() != mode_sizes.len() {
                return Err(SolverError::ShapeMismatch("index arity mismatch".into()));
            }
            let mut flat = 0usize;
            let mut stride = 1usize;
            for (k, (&i, &s)) in idx.iter().zip(mode_sizes.iter()).enumerate() {
                if i >= s {
                    return Err(SolverError::InvalidArgument(format!(
                        "index {i} out of range for mode {k} (size {s})"
                    )));
                }
                flat += i * stride;
                stride *= s;
            }
            if !seen.insert(flat) {
                return Err(SolverError::InvalidArgument("duplicate sample index".into()));
            }
        }
        Ok(Self { indices, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct CompletionConfig {
    /// Sweeps per rank level.
    pub sweeps_per_rank: usize,
    /// Total sweep budget.
    pub sweeps: usize,
    /// Target observed-entry RMSE (relative to the value RMS).
    pub tol: f64,
    pub seed: u64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self { sweeps_per_rank: 2, sweeps: 60, tol: 1e-8, seed: 0 }
    }
}

fn observed_rmse<T: Scalar>(x: &TTTrain<T>, omega: &SamplingSet<T>) -> f64 {
    let mut acc = 0.0f64;
    for (idx, &val) in omega.indices.iter().zip(omega.values.iter()) {
        let p = x.eval_at(idx).expect("index in range");
        let d = (p - val).to_f64().unwrap_or(f64::NAN);
        acc += d * d;
    }
    (acc / omega.len() as f64).sqrt()
}

/// Fits a train of the given target interior ranks to the observations.
pub fn tt_complete<T: Scalar>(
    mode_sizes: &[usize],
    omega: &SamplingSet<T>,
    target_ranks: &[usize],
    cfg: &CompletionConfig,
) -> Result<(TTTrain<T>, SolveReport)> {
    let start = Instant::now();
    if omega.is_empty() {
        return Err(SolverError::InvalidArgument("empty sampling set".into()));
    }
    if target_ranks.len() + 1 != mode_sizes.len() && mode_sizes.len() > 1 {
        return Err(SolverError::ShapeMismatch(format!(
            "expected {} target ranks",
            mode_sizes.len() - 1
        )));
    }
    let n = mode_sizes.len();
    let mut report = SolveReport::new("tt_complete");
    let value_rms = {
        let s: f64 = omega
            .values
            .iter()
            .map(|v| v.to_f64().unwrap_or(0.0).powi(2))
            .sum();
        (s / omega.len() as f64).sqrt().max(1e-300)
    };

    let mut x = TTTrain::<T>::random(mode_sizes, &vec![1; n.saturating_sub(1)], cfg.seed)?
        .orthogonalize(0)?;
    let mut rng = SplitMix64::new(cfg.seed ^ 0x9e37);
    let mut last_rmse = f64::INFINITY;
    let mut sweeps_done = 0usize;
    let mut stalls_at_rank = 0usize;
    while sweeps_done < cfg.sweeps {
        x = complete_sweep(x, omega, &mut report)?;
        sweeps_done += 1;
        report.sweeps = sweeps_done;
        let rmse = observed_rmse(&x, omega);
        report.residual_trace.push(rmse);
        if rmse / value_rms <= cfg.tol {
            report.converged = true;
            break;
        }
        stalls_at_rank += 1;
        let plateaued = rmse > 0.5 * last_rmse;
        last_rmse = rmse;
        if stalls_at_rank >= cfg.sweeps_per_rank && plateaued {
            // bump the first bond still below target
            let ranks = x.interior_ranks();
            if let Some(bond) = (0..ranks.len()).find(|&k| ranks[k] < target_ranks[k]) {
                x = widen_bond(&x, bond, &mut rng)?;
                stalls_at_rank = 0;
            }
        }
    }
    report.final_residual = report.residual_trace.last().copied();
    report.final_ranks = x.ranks();
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((x, report))
}

/// Appends one small random direction to bond `bond` (between cores `bond`
/// and `bond + 1`), perturbing the fit by at most ~1e−8 relative.
fn widen_bond<T: Scalar>(
    x: &TTTrain<T>,
    bond: usize,
    rng: &mut SplitMix64,
) -> Result<TTTrain<T>> {
    let mut cores = x.cores().to_vec();
    let (r0, i1, r1) = cores[bond].dim();
    let scale = {
        let norm: T = cores[bond].iter().map(|&v| v * v).sum::<T>().sqrt();
        norm.max(T::one()) * T::from_f64_c(1e-8)
    };
    let mut widened = Array3::zeros((r0, i1, r1 + 1));
    widened.slice_mut(ndarray::s![.., .., ..r1]).assign(&cores[bond]);
    for a in 0..r0 {
        for i in 0..i1 {
            widened[[a, i, r1]] = rng.normal::<T>() * scale;
        }
    }
    let (_, i2, r2) = cores[bond + 1].dim();
    let mut padded = Array3::zeros((r1 + 1, i2, r2));
    padded.slice_mut(ndarray::s![..r1, .., ..]).assign(&cores[bond + 1]);
    for i in 0..i2 {
        for b in 0..r2 {
            padded[[r1, i, b]] = rng.normal::<T>() * T::from_f64_c(1e-8);
        }
    }
    cores[bond] = widened;
    cores[bond + 1] = padded;
    Ok(TTTrain::new(cores)?)
}

/// One full sweep of slice-wise local least squares (forward then backward).
fn complete_sweep<T: Scalar>(
    x: TTTrain<T>,
    omega: &SamplingSet<T>,
    report: &mut SolveReport,
) -> Result<TTTrain<T>> {
    let n = x.order();
    let s_count = omega.len();
    let mut x = x.orthogonalize(0)?;
    // per-sample right partial products r_s[k] = product of core slices k..N−1
    let mut rights: Vec<Vec<Array1<T>>> = vec![Vec::new(); n + 1];
    rights[n] = vec![Array1::ones(1); s_count];
    for k in (1..n).rev() {
        let core = x.core(k);
        rights[k] = (0..s_count)
            .map(|s| {
                let slice = core.slice(ndarray::s![.., omega.indices[s][k], ..]);
                slice.dot(&rights[k + 1][s])
            })
            .collect();
    }
    let mut lefts: Vec<Array1<T>> = vec![Array1::ones(1); s_count];

    for site in 0..n {
        let (r0, i_sz, r1) = x.core(site).dim();
        check_local_dim(r0 * i_sz * r1)?;
        let mut new_core = Array3::zeros((r0, i_sz, r1));
        for slice_i in 0..i_sz {
            // gather samples hitting this slice
            let rows: Vec<usize> = (0..s_count)
                .filter(|&s| omega.indices[s][site] == slice_i)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let unknowns = r0 * r1;
            let mut g = Array2::zeros((rows.len(), unknowns));
            let mut y = Array2::zeros((rows.len(), 1));
            for (row, &s) in rows.iter().enumerate() {
                let l = &lefts[s];
                let r = &rights[site + 1][s];
                for a in 0..r0 {
                    for b in 0..r1 {
                        g[[row, a + r0 * b]] = l[a] * r[b];
                    }
                }
                y[[row, 0]] = omega.values[s];
            }
            let sol = if rows.len() < unknowns {
                // ridge-regularized normal equations for the underdetermined case
                if !report.warnings.iter().any(|w| w.contains("underdetermined")) {
                    report
                        .warnings
                        .push("underdetermined local system; ridge 1e-10 applied".into());
                }
                let gtg = g.t().dot(&g)
                    + Array2::<T>::eye(unknowns) * T::from_f64_c(1e-10);
                let gty = g.t().dot(&y);
                linalg::solve_spd(&gtg.view(), &gty.view())?
            } else {
                linalg::lstsq(&g.view(), &y.view())?
            };
            for a in 0..r0 {
                for b in 0..r1 {
                    new_core[[a, slice_i, b]] = sol[[a + r0 * b, 0]];
                }
            }
        }
        x.set_core(site, new_core)?;
        // record the observed SSE after this site update
        let sse: f64 = (0..s_count)
            .map(|s| {
                let core = x.core(site);
                let slice = core.slice(ndarray::s![.., omega.indices[s][site], ..]);
                let pred = lefts[s].dot(&slice.dot(&rights[site + 1][s]));
                let d = (pred - omega.values[s]).to_f64().unwrap_or(f64::NAN);
                d * d
            })
            .sum();
        report.objective_trace.push(sse);

        if site + 1 < n {
            // left-orthogonalize and advance the left partials
            let (q, rmat) = linalg::qr_thin(&ttkit_core::tt::left_unfold(x.core(site)).view())?;
            let new_core = ttkit_core::tt::fold_left(q, r0, i_sz);
            let nxt = rmat.dot(&ttkit_core::tt::right_unfold(x.core(site + 1)));
            let (_, i2, r2) = x.core(site + 1).dim();
            let mut cores = x.cores().to_vec();
            cores[site] = new_core;
            cores[site + 1] = ttkit_core::tt::fold_right(nxt, i2, r2);
            x = TTTrain::new(cores)?;
            for s in 0..s_count {
                let slice = x.core(site).slice(ndarray::s![.., omega.indices[s][site], ..]);
                lefts[s] = slice.t().dot(&lefts[s]);
            }
            // refresh the stale right partials at this bond
            for s in 0..s_count {
                let slice =
                    x.core(site + 1).slice(ndarray::s![.., omega.indices[s][site + 1], ..]);
                rights[site + 1][s] = slice.dot(&rights[site + 2][s]);
            }
        }
    }
    Ok(x)
}
