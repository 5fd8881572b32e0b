//! Dense CP (canonical polyadic) decomposition by alternating least squares.

use crate::error::{Result, SolverError};
use ndarray::{Array1, Array2};
use ttkit_core::{linalg, DenseTensor, Scalar, SplitMix64};

#[derive(Clone, Debug)]
pub struct CpConfig {
    pub rank: usize,
    pub iters: usize,
    /// Stop when the fit improves by less than this between iterations.
    pub tol: f64,
    pub seed: u64,
    /// Number of leading modes forced to share one factor matrix
    /// (0 = unconstrained). All tied modes must have equal size.
    pub symmetric_modes: usize,
}

impl Default for CpConfig {
    fn default() -> Self {
        Self { rank: 1, iters: 100, tol: 1e-10, seed: 0, symmetric_modes: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct CpDecomposition<T> {
    /// One `Iₙ × R` factor per mode, columns normalized.
    pub factors: Vec<Array2<T>>,
    /// Component weights.
    pub lambda: Array1<T>,
    /// `1 − ‖X − X̂‖/‖X‖`.
    pub fit: f64,
    pub fit_trace: Vec<f64>,
}

impl<T: Scalar> CpDecomposition<T> {
    pub fn reconstruct(&self, mode_sizes: &[usize]) -> DenseTensor<T> {
        let r = self.lambda.len();
        let total: usize = mode_sizes.iter().product();
        let mut values = vec![T::zero(); total];
        let mut idx = vec![0usize; mode_sizes.len()];
        for (flat, v) in values.iter_mut().enumerate() {
            let mut rem = flat;
            for (k, &s) in mode_sizes.iter().enumerate() {
                idx[k] = rem % s;
                rem /= s;
            }
            let mut acc = T::zero();
            for rr in 0..r {
                let mut prod = self.lambda[rr];
                for (k, &i) in idx.iter().enumerate() {
                    prod = prod * self.factors[k][[i, rr]];
                }
                acc = acc + prod;
            }
            *v = acc;
        }
        DenseTensor::from_vec(mode_sizes, values).expect("consistent shape")
    }
}

/// Khatri–Rao design matrix for mode `n`: row index runs column-major over
/// the remaining modes in their original order.
fn khatri_rao_others<T: Scalar>(
    factors: &[Array2<T>],
    sizes: &[usize],
    n: usize,
    rank: usize,
) -> Array2<T> {
    let rest: usize = sizes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != n)
        .map(|(_, &s)| s)
        .product();
    let mut out = Array2::zeros((rest, rank));
    let mut idx = vec![0usize; sizes.len()];
    for row in 0..rest {
        let mut rem = row;
        for (k, &s) in sizes.iter().enumerate() {
            if k == n {
                continue;
            }
            idx[k] = rem % s;
            rem /= s;
        }
        for r in 0..rank {
            let mut prod = T::one();
            for (k, &s) in sizes.iter().enumerate() {
                if k == n {
                    continue;
                }
                let _ = s;
                prod = prod * factors[k][[idx[k], r]];
            }
            out[[row, r]] = prod;
        }
    }
    out
}

/// Alternating least squares for a rank-`R` CP model.
pub fn cp_als<T: Scalar>(x: &DenseTensor<T>, cfg: &CpConfig) -> Result<CpDecomposition<T>> {
    let sizes = x.mode_sizes().to_vec();
    let n_modes = sizes.len();
    let rank = cfg.rank.max(1);
    if cfg.symmetric_modes > n_modes {
        return Err(SolverError::InvalidArgument(
            "more symmetric modes than tensor modes".into(),
        ));
    }
    if cfg.symmetric_modes > 1 {
        let s0 = sizes[0];
        if sizes[..cfg.symmetric_modes].iter().any(|&s| s != s0) {
            return Err(SolverError::InvalidArgument(
                "symmetric modes must share one size".into(),
            ));
        }
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let mut factors: Vec<Array2<T>> = sizes.iter().map(|&s| rng.normal_mat(s, rank)).collect();
    if cfg.symmetric_modes > 1 {
        let shared = factors[0].clone();
        for k in 1..cfg.symmetric_modes {
            factors[k] = shared.clone();
        }
    }
    let mut lambda = Array1::<T>::ones(rank);
    let x_norm = x.fro_norm();
    let unfoldings: Vec<Array2<T>> = (0..n_modes).map(|n| x.mode_unfolding(n)).collect();
    let mut fit_trace = Vec::new();
    let mut last_fit = -f64::INFINITY;
    for _ in 0..cfg.iters {
        for n in 0..n_modes {
            let kr = khatri_rao_others(&factors, &sizes, n, rank);
            // gram = Hadamard of the other factors' Grams
            let mut gram = Array2::<T>::ones((rank, rank));
            for (k, f) in factors.iter().enumerate() {
                if k == n {
                    continue;
                }
                let g = f.t().dot(f);
                gram.zip_mut_with(&g, |a, &b| *a = *a * b);
            }
            let rhs = unfoldings[n].dot(&kr); // Iₙ × R
            let gram_inv = linalg::pinv(&gram.view(), T::from_f64_c(1e-12))?;
            let mut new_f = rhs.dot(&gram_inv);
            // column normalization into lambda
            for r in 0..rank {
                let norm: T = new_f.column(r).iter().map(|&v| v * v).sum::<T>().sqrt();
                lambda[r] = norm;
                if norm > T::zero() {
                    new_f.column_mut(r).mapv_inplace(|v| v / norm);
                }
            }
            factors[n] = new_f;
        }
        if cfg.symmetric_modes > 1 {
            // sign-align the tied factors against mode 0, average, and
            // re-estimate the weights afterwards
            let mut shared = factors[0].clone();
            for k in 1..cfg.symmetric_modes {
                for r in 0..rank {
                    let dot: T = factors[0]
                        .column(r)
                        .iter()
                        .zip(factors[k].column(r).iter())
                        .map(|(&a, &b)| a * b)
                        .sum();
                    let sign = if dot < T::zero() { -T::one() } else { T::one() };
                    for i in 0..shared.nrows() {
                        shared[[i, r]] = shared[[i, r]] + sign * factors[k][[i, r]];
                    }
                }
            }
            shared.mapv_inplace(|v| v / T::from_f64_c(cfg.symmetric_modes as f64));
            for r in 0..rank {
                let norm: T = shared.column(r).iter().map(|&v| v * v).sum::<T>().sqrt();
                if norm > T::zero() {
                    shared.column_mut(r).mapv_inplace(|v| v / norm);
                }
            }
            for k in 0..cfg.symmetric_modes {
                factors[k] = shared.clone();
            }
            // weights by linear least squares with all factors fixed
            let mut gram_all = Array2::<T>::ones((rank, rank));
            for f in &factors {
                let g = f.t().dot(f);
                gram_all.zip_mut_with(&g, |a, &b| *a = *a * b);
            }
            let kr0 = khatri_rao_others(&factors, &sizes, 0, rank);
            let m = unfoldings[0].dot(&kr0);
            let mut c = Array2::<T>::zeros((rank, 1));
            for r in 0..rank {
                c[[r, 0]] = m
                    .column(r)
                    .iter()
                    .zip(factors[0].column(r).iter())
                    .map(|(&a, &b)| a * b)
                    .sum();
            }
            let sol = linalg::solve_spd(&gram_all.view(), &c.view())?;
            for r in 0..rank {
                lambda[r] = sol[[r, 0]];
            }
        }
        // fit via ⟨X, X̂⟩ and ‖X̂‖²
        let mut gram_all = Array2::<T>::ones((rank, rank));
        for f in &factors {
            let g = f.t().dot(f);
            gram_all.zip_mut_with(&g, |a, &b| *a = *a * b);
        }
        let norm_hat_sq = lambda.dot(&gram_all.dot(&lambda));
        let kr0 = khatri_rao_others(&factors, &sizes, 0, rank);
        let m = unfoldings[0].dot(&kr0); // I₀ × R
        let mut inner = T::zero();
        for r in 0..rank {
            let col: T = m
                .column(r)
                .iter()
                .zip(factors[0].column(r).iter())
                .map(|(&a, &b)| a * b)
                .sum();
            inner = inner + lambda[r] * col;
        }
        let err_sq =
            (x_norm * x_norm + norm_hat_sq - T::from_f64_c(2.0) * inner).max(T::zero());
        // a vanishing input carries no signal to explain: report zero fit
        let fit = if x_norm <= T::epsilon() {
            0.0
        } else {
            1.0 - (err_sq.sqrt() / x_norm).to_f64().unwrap_or(f64::NAN)
        };
        fit_trace.push(fit);
        if (fit - last_fit).abs() < cfg.tol {
            last_fit = fit;
            break;
        }
        last_fit = fit;
    }
    Ok(CpDecomposition { factors, lambda, fit: last_fit, fit_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_tensor(sizes: &[usize], rank: usize, seed: u64) -> (DenseTensor<f64>, Vec<Array2<f64>>) {
        let mut rng = SplitMix64::new(seed);
        let factors: Vec<Array2<f64>> = sizes.iter().map(|&s| rng.normal_mat(s, rank)).collect();
        let lambda = Array1::<f64>::ones(rank);
        let cp = CpDecomposition { factors: factors.clone(), lambda, fit: 0.0, fit_trace: vec![] };
        (cp.reconstruct(sizes), factors)
    }

    /// Best |cosine| matching between estimated and true factor columns.
    fn congruence(est: &Array2<f64>, truth: &Array2<f64>) -> f64 {
        let r = truth.ncols();
        let mut used = vec![false; r];
        let mut worst: f64 = 1.0;
        for rt in 0..r {
            let t = truth.column(rt);
            let tn = t.dot(&t).sqrt();
            let mut best = 0.0;
            let mut best_j = 0;
            for (j, u) in used.iter().enumerate() {
                if *u {
                    continue;
                }
                let e = est.column(j);
                let c = (t.dot(&e) / (tn * e.dot(&e).sqrt())).abs();
                if c > best {
                    best = c;
                    best_j = j;
                }
            }
            used[best_j] = true;
            worst = worst.min(best);
        }
        worst
    }

    #[test]
    fn exact_rank_one_is_fit_perfectly() {
        let (x, _) = rank_tensor(&[4, 5, 3], 1, 1);
        let cp = cp_als(&x, &CpConfig { rank: 1, ..Default::default() }).unwrap();
        assert!(cp.fit >= 1.0 - 1e-10, "fit {}", cp.fit);
    }

    #[test]
    fn rank_three_recovery_with_congruence() {
        let (x, truth) = rank_tensor(&[5, 5, 5], 3, 7);
        let cp = cp_als(&x, &CpConfig { rank: 3, iters: 400, ..Default::default() }).unwrap();
        assert!(cp.fit > 1.0 - 1e-8, "fit {}", cp.fit);
        for (f, t) in cp.factors.iter().zip(truth.iter()) {
            assert!(congruence(f, t) >= 0.999, "congruence {}", congruence(f, t));
        }
    }

    #[test]
    fn noisy_rank_three_keeps_high_fit() {
        let (x, _) = rank_tensor(&[5, 5, 5], 3, 9);
        let noise = DenseTensor::<f64>::random_normal(&[5, 5, 5], 10);
        // SNR 40 dB: noise scaled to 1e-2 of the signal norm
        let scaled = noise.scale(0.01 * x.fro_norm() / noise.fro_norm());
        let noisy = x.add(&scaled).unwrap();
        let cp = cp_als(&noisy, &CpConfig { rank: 3, iters: 300, ..Default::default() }).unwrap();
        assert!(cp.fit >= 0.99, "fit {}", cp.fit);
    }

    #[test]
    fn fit_is_non_decreasing() {
        let (x, _) = rank_tensor(&[4, 4, 4], 2, 13);
        let noise = DenseTensor::<f64>::random_normal(&[4, 4, 4], 14).scale(0.05);
        let noisy = x.add(&noise).unwrap();
        let cp = cp_als(&noisy, &CpConfig { rank: 2, iters: 60, ..Default::default() }).unwrap();
        for w in cp.fit_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{:?}", cp.fit_trace);
        }
    }

    #[test]
    fn symmetric_flag_ties_factors() {
        // symmetric tensor from a shared factor
        let mut rng = SplitMix64::new(3);
        let shared: Array2<f64> = rng.normal_mat(4, 2);
        let cp_true = CpDecomposition {
            factors: vec![shared.clone(), shared.clone(), shared.clone()],
            lambda: Array1::ones(2),
            fit: 0.0,
            fit_trace: vec![],
        };
        let x = cp_true.reconstruct(&[4, 4, 4]);
        let cfg = CpConfig { rank: 2, iters: 300, symmetric_modes: 3, ..Default::default() };
        let cp = cp_als(&x, &cfg).unwrap();
        assert!(cp.fit > 1.0 - 1e-6, "fit {}", cp.fit);
        for k in 1..3 {
            let dev: f64 = cp.factors[0]
                .iter()
                .zip(cp.factors[k].iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12);
        }
    }
}
