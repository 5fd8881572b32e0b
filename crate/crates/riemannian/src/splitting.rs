//! Projector-splitting integrator step for dynamical low-rank matrix
//! approximation (KSL ordering: a step in the left factor, a backward step
//! in the core, a step in the right factor). The update is exact whenever
//! the endpoints both have rank at most the approximation rank.

use crate::error::{Result, RiemannianError};
use ndarray::{Array2, ArrayView2};
use ttkit_core::{linalg, Scalar};

/// Rank-`R` matrix in factored form `U S Vᵀ` with orthonormal `U`, `V`.
#[derive(Clone, Debug)]
pub struct LowRankMatrix<T> {
    pub u: Array2<T>,
    pub s: Array2<T>,
    pub v: Array2<T>,
}

impl<T: Scalar> LowRankMatrix<T> {
    pub fn new(u: Array2<T>, s: Array2<T>, v: Array2<T>) -> Result<Self> {
        if u.ncols() != s.nrows() || s.ncols() != v.ncols() {
            return Err(RiemannianError::ShapeMismatch(
                "factor dimensions are inconsistent".into(),
            ));
        }
        Ok(Self { u, s, v })
    }

    /// Best rank-`r` factorization of a dense matrix.
    pub fn from_dense(a: &ArrayView2<T>, rank: usize) -> Result<Self> {
        let (u, sv, vt) = linalg::svd_trunc(a, T::zero(), rank)?;
        let r = sv.len();
        let mut s = Array2::zeros((r, r));
        for i in 0..r {
            s[[i, i]] = sv[i];
        }
        Ok(Self { u, s, v: vt.t().to_owned() })
    }

    pub fn to_dense(&self) -> Array2<T> {
        self.u.dot(&self.s).dot(&self.v.t())
    }

    pub fn rank(&self) -> usize {
        self.s.nrows()
    }
}

/// One projector-splitting step from `A₀` to `A₁`, starting at `Y₀`.
pub fn projector_splitting_step<T: Scalar>(
    y0: &LowRankMatrix<T>,
    a0: &ArrayView2<T>,
    a1: &ArrayView2<T>,
) -> Result<LowRankMatrix<T>> {
    let (rows, cols) = a0.dim();
    if a1.dim() != (rows, cols) || y0.u.nrows() != rows || y0.v.nrows() != cols {
        return Err(RiemannianError::ShapeMismatch(
            "endpoint and factor shapes disagree".into(),
        ));
    }
    let delta = a1.to_owned() - a0;
    // forward step in the left factor: K₁ = U₀S₀ + ΔA·V₀ = U₁·Ŝ
    let k1 = y0.u.dot(&y0.s) + delta.dot(&y0.v);
    let (u1, s_hat) = linalg::qr_thin(&k1.view())?;
    // backward step in the core: S̃ = Ŝ − U₁ᵀ·ΔA·V₀
    let s_tilde = &s_hat - &u1.t().dot(&delta).dot(&y0.v);
    // forward step in the right factor: L₁ = V₀S̃ᵀ + ΔAᵀ·U₁ = V₁·S₁ᵀ
    let l1 = y0.v.dot(&s_tilde.t()) + delta.t().dot(&u1);
    let (v1, s1t) = linalg::qr_thin(&l1.view())?;
    Ok(LowRankMatrix { u: u1, s: s1t.t().to_owned(), v: v1 })
}
