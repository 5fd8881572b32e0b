//! Least-squares support tensor machine: a rank-one multilinear classifier
//! `sign(X ×̄₁ w₁ ⋯ ×̄_N w_N + b)` fitted by cycling over modes; each mode
//! subproblem is a least-squares SVM whose KKT conditions form one dense
//! linear system.

use crate::error::{RegressionError, Result};
use ndarray::{Array1, Array2};
use ttkit_core::{linalg, DenseTensor, Scalar, SplitMix64};

#[derive(Clone, Debug)]
pub struct LsStmModel<T> {
    pub weights: Vec<Array1<T>>,
    pub bias: T,
    pub gamma: f64,
    pub objective_trace: Vec<f64>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> LsStmModel<T> {
    /// Raw decision value `X ×̄₁ w₁ ⋯ ×̄_N w_N + b`.
    pub fn decision(&self, x: &DenseTensor<T>) -> Result<T> {
        let mut cur = x.clone();
        for w in self.weights.iter().rev() {
            let mode = cur.order() - 1;
            cur = cur.vec_product(w, mode)?;
        }
        Ok(cur.get(&[0]) + self.bias)
    }

    /// Class prediction in `{−1, +1}`.
    pub fn predict(&self, x: &DenseTensor<T>) -> Result<T> {
        let d = self.decision(x)?;
        Ok(if d >= T::zero() { T::one() } else { -T::one() })
    }
}

/// Fits the rank-one classifier on labelled tensors (`labels` in ±1).
pub fn lsstm_fit<T: Scalar>(
    samples: &[DenseTensor<T>],
    labels: &[T],
    gamma: f64,
    iters: usize,
    seed: u64,
) -> Result<LsStmModel<T>> {
    if samples.is_empty() || samples.len() != labels.len() {
        return Err(RegressionError::ShapeMismatch(
            "need one label per training tensor".into(),
        ));
    }
    let sizes = samples[0].mode_sizes().to_vec();
    if samples.iter().any(|s| s.mode_sizes() != sizes) {
        return Err(RegressionError::ShapeMismatch("inconsistent sample shapes".into()));
    }
    let m = samples.len();
    let n_modes = sizes.len();
    let mut warnings = Vec::new();
    let all_same = labels.windows(2).all(|w| w[0] == w[1]);
    if all_same {
        warnings.push("all labels identical; returning a bias-only classifier".into());
        return Ok(LsStmModel {
            weights: sizes.iter().map(|&s| Array1::zeros(s)).collect(),
            bias: labels[0],
            gamma,
            objective_trace: vec![],
            warnings,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights: Vec<Array1<T>> = sizes
        .iter()
        .map(|&s| {
            let mut v: Array1<T> = rng.normal_vec(s);
            let n = v.iter().map(|&a| a * a).sum::<T>().sqrt();
            v.mapv_inplace(|a| a / n);
            v
        })
        .collect();
    let mut bias = T::zero();
    let gamma_t = T::from_f64_c(gamma);
    let mut objective_trace = Vec::new();

    for _ in 0..iters.max(1) {
        for mode in 0..n_modes {
            // per-sample projected feature vectors for this mode
            let eta: T = weights
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != mode)
                .map(|(_, w)| w.iter().map(|&a| a * a).sum::<T>())
                .fold(T::one(), |acc, v| acc * v);
            let feats: Vec<Array1<T>> = samples
                .iter()
                .map(|s| {
                    let mut cur = s.clone();
                    for k in (0..n_modes).rev() {
                        if k == mode {
                            continue;
                        }
                        cur = cur.vec_product(&weights[k], k)?;
                    }
                    Ok(Array1::from(cur.to_vec()))
                })
                .collect::<Result<_>>()?;
            // LS-SVM dual: [Ω/η + I/γ, y; yᵀ, 0] [α; b] = [1; 0]
            let dim = m + 1;
            let mut sys = Array2::<T>::zeros((dim, dim));
            for i in 0..m {
                for j in 0..m {
                    let k_ij = feats[i].dot(&feats[j]);
                    sys[[i, j]] = labels[i] * labels[j] * k_ij / eta;
                }
                sys[[i, i]] = sys[[i, i]] + T::one() / gamma_t;
                sys[[i, m]] = labels[i];
                sys[[m, i]] = labels[i];
            }
            let mut rhs = Array2::<T>::zeros((dim, 1));
            for i in 0..m {
                rhs[[i, 0]] = T::one();
            }
            let sol = linalg::solve(&sys.view(), &rhs.view())?;
            let alphas: Vec<T> = (0..m).map(|i| sol[[i, 0]]).collect();
            bias = sol[[m, 0]];
            // w = (1/η) Σ αᵢ yᵢ xᵢ
            let mut w = Array1::<T>::zeros(sizes[mode]);
            for i in 0..m {
                let coeff = alphas[i] * labels[i] / eta;
                w.zip_mut_with(&feats[i], |a, &b| *a = *a + coeff * b);
            }
            weights[mode] = w;
        }
        // global objective ½·Π‖wₙ‖² + (γ/2)Σ εₘ²
        let model_tmp = LsStmModel {
            weights: weights.clone(),
            bias,
            gamma,
            objective_trace: vec![],
            warnings: vec![],
        };
        let prod_norm: T = weights
            .iter()
            .map(|w| w.iter().map(|&a| a * a).sum::<T>())
            .fold(T::one(), |acc, v| acc * v);
        let mut eps_sq = T::zero();
        for (s, &ylab) in samples.iter().zip(labels.iter()) {
            let d = model_tmp.decision(s)?;
            let e = T::one() - ylab * d;
            eps_sq = eps_sq + e * e;
        }
        let obj = (prod_norm + gamma_t * eps_sq) * T::from_f64_c(0.5);
        objective_trace.push(obj.to_f64().unwrap_or(f64::NAN));
    }
    Ok(LsStmModel { weights, bias, gamma, objective_trace, warnings })
}
