//! Multilinear Tucker regression: `Y ≈ X ×₁ W₁ ⋯ ×_N W_N` over stacked
//! observations, fitted by cyclic exact least-squares updates of the mode
//! matrices.
//!
//! `X` has shape `(I₁, …, I_N, M)` and `Y` shape `(J₁, …, J_N, M)`; the
//! trailing mode indexes replicated observations and is never regressed.

use crate::error::{RegressionError, Result};
use ndarray::Array2;
use ttkit_core::{linalg, DenseTensor, Scalar, SplitMix64};

#[derive(Clone, Debug)]
pub struct MtrModel<T> {
    /// Mode matrices `Wₙ` of shape `Jₙ × Iₙ`.
    pub weights: Vec<Array2<T>>,
    pub residual_trace: Vec<f64>,
}

impl<T: Scalar> MtrModel<T> {
    /// Applies the fitted multilinear map to a feature tensor
    /// `(I₁, …, I_N)` (no sample mode).
    pub fn predict(&self, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
        let mut out = x.clone();
        for (n, w) in self.weights.iter().enumerate() {
            out = out.mode_product(w, n)?;
        }
        Ok(out)
    }

    /// Applies the map to a stacked batch `(I₁, …, I_N, M)`.
    pub fn predict_batch(&self, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
        let mut out = x.clone();
        for (n, w) in self.weights.iter().enumerate() {
            out = out.mode_product(w, n)?;
        }
        Ok(out)
    }
}

/// Fits the mode matrices by alternating least squares.
pub fn mtr_fit<T: Scalar>(
    x: &DenseTensor<T>,
    y: &DenseTensor<T>,
    iters: usize,
    seed: u64,
) -> Result<MtrModel<T>> {
    let xs = x.mode_sizes().to_vec();
    let ys = y.mode_sizes().to_vec();
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(RegressionError::ShapeMismatch(
            "X and Y must share the order (features + sample mode)".into(),
        ));
    }
    let n_modes = xs.len() - 1;
    if xs[n_modes] != ys[n_modes] {
        return Err(RegressionError::ShapeMismatch(format!(
            "sample counts differ: {} vs {}",
            xs[n_modes], ys[n_modes]
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights: Vec<Array2<T>> =
        (0..n_modes).map(|n| rng.normal_mat(ys[n], xs[n])).collect();
    let mut residual_trace = Vec::new();
    let y_norm = y.fro_norm().to_f64().unwrap_or(1.0).max(1e-300);
    for _ in 0..iters.max(1) {
        for n in 0..n_modes {
            // project all feature modes but n
            let mut xn = x.clone();
            for (k, w) in weights.iter().enumerate() {
                if k == n {
                    continue;
                }
                xn = xn.mode_product(w, k)?;
            }
            let xmat = xn.mode_unfolding(n); // Iₙ × rest
            let ymat = y.mode_unfolding(n); // Jₙ × rest
            // Wₙ = Y₍ₙ₎ Xₘᵀ (Xₘ Xₘᵀ)⁻¹ with a pseudo-inverse guard
            let gram = xmat.dot(&xmat.t());
            let ginv = linalg::pinv(&gram.view(), T::from_f64_c(1e-12))?;
            weights[n] = ymat.dot(&xmat.t()).dot(&ginv);
        }
        // residual over the stacked batch
        let mut pred = x.clone();
        for (k, w) in weights.iter().enumerate() {
            pred = pred.mode_product(w, k)?;
        }
        let err = pred.sub(y)?.fro_norm().to_f64().unwrap_or(f64::NAN) / y_norm;
        residual_trace.push(err);
        if residual_trace.len() >= 2 {
            let len = residual_trace.len();
            if (residual_trace[len - 2] - residual_trace[len - 1]).abs() < 1e-14 {
                break;
            }
        }
    }
    Ok(MtrModel { weights, residual_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(sizes_in: &[usize], sizes_out: &[usize], m: usize, seed: u64) -> (DenseTensor<f64>, DenseTensor<f64>, Vec<Array2<f64>>) {
        let mut rng = SplitMix64::new(seed);
        let mut xs = sizes_in.to_vec();
        xs.push(m);
        let x = DenseTensor::<f64>::random_normal(&xs, seed ^ 0xf00);
        let ws: Vec<Array2<f64>> = sizes_in
            .iter()
            .zip(sizes_out.iter())
            .map(|(&i, &j)| rng.normal_mat(j, i))
            .collect();
        let mut y = x.clone();
        for (n, w) in ws.iter().enumerate() {
            y = y.mode_product(w, n).unwrap();
        }
        (x, y, ws)
    }

    #[test]
    fn noiseless_planted_model_is_recovered() {
        let (x, y, _) = planted(&[3, 4], &[2, 3], 40, 3);
        let model = mtr_fit(&x, &y, 30, 0).unwrap();
        assert!(model.residual_trace.last().unwrap() < &1e-8);
        // predictions on the training batch match
        let pred = model.predict_batch(&x).unwrap();
        assert!(pred.rel_err(&y) < 1e-8);
    }

    #[test]
    fn single_mode_reduces_to_matrix_least_squares() {
        let (x, y, _) = planted(&[5], &[3], 30, 7);
        let model = mtr_fit(&x, &y, 5, 0).unwrap();
        // dense oracle: W = Y X⁺
        let xm = x.mode_unfolding(0);
        let ym = y.mode_unfolding(0);
        let want = ym.dot(&linalg::pinv(&xm.view(), 1e-12).unwrap());
        let dev = (&model.weights[0] - &want)
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-8, "max dev {dev}");
    }

    #[test]
    fn identity_truth_predicts_exactly() {
        // ground-truth Wₙ = I recovered up to an invertible gauge: the
        // PREDICTIONS must be exact even though the factors may differ
        let mut xs = vec![3usize, 3];
        xs.push(25);
        let x = DenseTensor::<f64>::random_normal(&xs, 9);
        let y = x.clone();
        let model = mtr_fit(&x, &y, 20, 1).unwrap();
        let pred = model.predict_batch(&x).unwrap();
        assert!(pred.rel_err(&y) < 1e-9);
    }

    #[test]
    fn residual_is_monotone() {
        let (x, y, _) = planted(&[3, 3], &[3, 2], 20, 11);
        let noise = DenseTensor::<f64>::random_normal(y.mode_sizes(), 5).scale(0.1);
        let noisy = y.add(&noise).unwrap();
        let model = mtr_fit(&x, &noisy, 25, 0).unwrap();
        for w in model.residual_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "{:?}", model.residual_trace);
        }
    }
}
