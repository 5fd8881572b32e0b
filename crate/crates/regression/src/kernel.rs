//! Kernel functions for tensor-valued inputs.

use crate::error::{RegressionError, Result};
use ndarray::Array2;
use ttkit_core::{linalg, DenseTensor, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum KernelConfig {
    /// `⟨vec(X), vec(X′)⟩`
    Linear,
    /// `exp(−‖X − X′‖²_F / (2β²))`
    GaussianRbf { beta: f64 },
    /// Product over modes of Gaussians in the chordal distance between the
    /// right singular subspaces of the mode unfoldings.
    Chordal { beta: f64 },
}

impl KernelConfig {
    fn validate(&self) -> Result<()> {
        match self {
            KernelConfig::Linear => Ok(()),
            KernelConfig::GaussianRbf { beta } | KernelConfig::Chordal { beta } => {
                if *beta > 0.0 {
                    Ok(())
                } else {
                    Err(RegressionError::InvalidArgument(
                        "kernel width beta must be positive".into(),
                    ))
                }
            }
        }
    }
}

/// Squared chordal distance `‖VVᵀ − V′V′ᵀ‖²_F = r + r′ − 2‖VᵀV′‖²_F`
/// between the mode-`n` singular subspaces (spans of the mode-`n` fibers,
/// i.e. the leading singular vectors of the unfolding in `R^{Iₙ}`).
fn chordal_sq<T: Scalar>(x: &DenseTensor<T>, y: &DenseTensor<T>, mode: usize) -> Result<f64> {
    let xu = x.mode_unfolding(mode);
    let yu = y.mode_unfolding(mode);
    let (ux, sx, _) = linalg::svd(&xu.view())?;
    let (uy, sy, _) = linalg::svd(&yu.view())?;
    let cutoff_x = sx[0].max(T::epsilon()) * T::from_f64_c(1e-12);
    let cutoff_y = sy[0].max(T::epsilon()) * T::from_f64_c(1e-12);
    let rx = sx.iter().take_while(|&&s| s > cutoff_x).count().max(1);
    let ry = sy.iter().take_while(|&&s| s > cutoff_y).count().max(1);
    let vx = ux.slice(ndarray::s![.., ..rx]);
    let vy = uy.slice(ndarray::s![.., ..ry]);
    let cross = vx.t().dot(&vy);
    let overlap: T = cross.iter().map(|&v| v * v).sum();
    let d = rx as f64 + ry as f64 - 2.0 * overlap.to_f64().unwrap_or(0.0);
    Ok(d.max(0.0))
}


/// Kernel evaluation between two tensors of identical mode sizes.
pub fn kernel_value<T: Scalar>(
    x: &DenseTensor<T>,
    y: &DenseTensor<T>,
    cfg: &KernelConfig,
) -> Result<T> {
    cfg.validate()?;
    if x.mode_sizes() != y.mode_sizes() {
        return Err(RegressionError::ShapeMismatch(
            "kernel inputs must share mode sizes".into(),
        ));
    }
    match cfg {
        KernelConfig::Linear => Ok(x.dot(y)?),
        KernelConfig::GaussianRbf { beta } => {
            let d = x.sub(y)?.fro_norm();
            let b = T::from_f64_c(*beta);
            Ok((-(d * d) / (T::from_f64_c(2.0) * b * b)).exp())
        }
        KernelConfig::Chordal { beta } => {
            let mut acc = 0.0f64;
            for mode in 0..x.order() {
                acc += chordal_sq(x, y, mode)?;
            }
            Ok(T::from_f64_c((-acc / (2.0 * beta * beta)).exp()))
        }
    }
}

/// Gram matrix over a list of tensors.
pub fn kernel_matrix<T: Scalar>(
    tensors: &[DenseTensor<T>],
    cfg: &KernelConfig,
) -> Result<Array2<T>> {
    cfg.validate()?;
    let m = tensors.len();
    if m == 0 {
        return Err(RegressionError::InvalidArgument("no input tensors".into()));
    }
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in i..m {
            let v = kernel_value(&tensors[i], &tensors[j], cfg)?;
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}
