//! Higher-order low-rank regression: ridge regression from vector inputs to
//! tensor responses with a multilinear rank constraint on the coefficient
//! tensor, plus its kernelized form.
//!
//! The sample-mode subspace comes from the top eigenvectors of the pencil
//! `XᵀY₍₁₎Y₍₁₎ᵀX v = λ (XᵀX + γI) v`, solved in its symmetric generalized
//! form; the response-mode subspaces are leading eigenspaces of the mode
//! Grams.

use crate::error::{RegressionError, Result};
use ndarray::{Array1, Array2};
use ttkit_core::{linalg, DenseTensor, Scalar};

#[derive(Clone, Debug)]
pub struct HolrrModel<T> {
    /// Core tensor of shape `(R₀, R₁, …, R_N)`.
    pub core: DenseTensor<T>,
    /// `U⁽⁰⁾ (I₀ × R₀ or M × R₀)` and `U⁽ⁿ⁾ (Jₙ × Rₙ)`, orthonormal columns.
    pub factors: Vec<Array2<T>>,
    pub gamma: f64,
    /// True when fitted in the kernel formulation (prediction then takes a
    /// kernel row instead of a feature vector).
    pub kernelized: bool,
}

impl<T: Scalar> HolrrModel<T> {
    /// Predicts the response tensor for one input (feature vector, or the
    /// kernel row `k(x, xₘ)` in the kernelized case).
    pub fn predict(&self, x: &Array1<T>) -> Result<DenseTensor<T>> {
        let u0 = &self.factors[0];
        if x.len() != u0.nrows() {
            return Err(RegressionError::ShapeMismatch(format!(
                "input length {} vs expected {}",
                x.len(),
                u0.nrows()
            )));
        }
        let xu = u0.t().dot(x); // R₀
        let mut out = self.core.vec_product(&xu, 0)?;
        for (n, u) in self.factors.iter().enumerate().skip(1) {
            out = out.mode_product(u, n - 1)?;
        }
        Ok(out)
    }
}

/// Orthonormal basis of the span of the columns.
fn orthonormalize<T: Scalar>(m: &Array2<T>) -> Result<Array2<T>> {
    let (q, _r) = linalg::qr_thin(&m.view())?;
    Ok(q)
}

/// Top-`r` eigenvectors of the symmetric pencil `B v = λ M v` with `M` SPD,
/// through the Cholesky-free route `P = M^{-1/2} B M^{-1/2}` built from the
/// eigendecomposition of `M`.
fn generalized_top_eigvecs<T: Scalar>(
    b: &Array2<T>,
    m: &Array2<T>,
    r: usize,
) -> Result<Array2<T>> {
    let (vals, vecs) = linalg::eigh_asc(&m.view())?;
    let floor = vals[vals.len() - 1].max(T::epsilon()) * T::from_f64_c(1e-13);
    if vals[0] <= floor {
        return Err(RegressionError::Singular(
            "metric is singular; use a positive ridge parameter".into(),
        ));
    }
    let n = vals.len();
    let mut m_inv_half = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + vecs[[i, k]] * vecs[[j, k]] / vals[k].sqrt();
            }
            m_inv_half[[i, j]] = acc;
        }
    }
    let p = m_inv_half.dot(b).dot(&m_inv_half);
    let (_pv, pvecs) = linalg::eigh_asc(&p.view())?;
    let cols = pvecs.ncols();
    let take = r.min(cols);
    let mut top = Array2::zeros((n, take));
    for j in 0..take {
        top.column_mut(j).assign(&pvecs.column(cols - 1 - j));
    }
    Ok(m_inv_half.dot(&top))
}

/// Leading eigenvectors of the mode-`n` Gram of `y`.
fn mode_subspace<T: Scalar>(y: &DenseTensor<T>, mode: usize, rank: usize) -> Result<Array2<T>> {
    let unf = y.mode_unfolding(mode);
    let gram = unf.dot(&unf.t());
    let (_vals, vecs) = linalg::eigh_asc(&gram.view())?;
    let cols = vecs.ncols();
    let take = rank.min(cols);
    let mut out = Array2::zeros((vecs.nrows(), take));
    for j in 0..take {
        out.column_mut(j).assign(&vecs.column(cols - 1 - j));
    }
    Ok(out)
}

/// Fits the low-rank ridge regression from `X (M × I₀)` to `Y (M, J₁…J_N)`.
pub fn holrr_fit<T: Scalar>(
    x: &Array2<T>,
    y: &DenseTensor<T>,
    ranks: &[usize],
    gamma: f64,
) -> Result<HolrrModel<T>> {
    let m = x.nrows();
    let ys = y.mode_sizes().to_vec();
    if ys[0] != m {
        return Err(RegressionError::ShapeMismatch(format!(
            "X has {m} rows but Y has {} samples",
            ys[0]
        )));
    }
    let n_out = ys.len() - 1;
    if ranks.len() != n_out + 1 {
        return Err(RegressionError::ShapeMismatch(format!(
            "expected {} ranks (R₀ … R_N)",
            n_out + 1
        )));
    }
    if ranks[0] > x.ncols() || ranks[1..].iter().zip(&ys[1..]).any(|(&r, &j)| r > j) {
        return Err(RegressionError::InvalidArgument(
            "ranks exceed the corresponding dimensions".into(),
        ));
    }
    let gamma_t = T::from_f64_c(gamma);
    let xtx = x.t().dot(x);
    let metric = &xtx + &(Array2::<T>::eye(x.ncols()) * gamma_t);
    if gamma == 0.0 {
        // fail early with the suggested remedy when XᵀX is singular
        let (vals, _) = linalg::eigh_asc(&metric.view())?;
        let top = vals[vals.len() - 1].max(T::epsilon());
        if vals[0] <= top * T::from_f64_c(1e-12) {
            return Err(RegressionError::Singular(
                "XᵀX is singular with gamma = 0; choose gamma > 0".into(),
            ));
        }
    }
    let y0 = y.mode_unfolding(0); // M × ΠJ
    let xty = x.t().dot(&y0); // I₀ × ΠJ
    let b = xty.dot(&xty.t()); // XᵀY₍₁₎Y₍₁₎ᵀX
    let u0 = orthonormalize(&generalized_top_eigvecs(&b, &metric, ranks[0])?)?;

    let mut factors = vec![u0];
    for n in 1..=n_out {
        factors.push(mode_subspace(y, n, ranks[n])?);
    }
    // T = (U₀ᵀ(XᵀX + γI)U₀)⁻¹ U₀ᵀ Xᵀ, core = Y ×₀ T ×ₙ Uₙᵀ
    let u0 = &factors[0];
    let inner = u0.t().dot(&metric).dot(u0);
    let rhs = u0.t().dot(&x.t().to_owned());
    let t_map = linalg::solve_spd(&inner.view(), &rhs.view())?; // R₀ × M
    let mut core = y.mode_product(&t_map, 0)?;
    for n in 1..=n_out {
        core = core.mode_product(&factors[n].t().to_owned(), n)?;
    }
    Ok(HolrrModel { core, factors, gamma, kernelized: false })
}

/// Kernelized variant: fits from a Gram matrix `K (M × M)`.
pub fn kholrr_fit<T: Scalar>(
    k: &Array2<T>,
    y: &DenseTensor<T>,
    ranks: &[usize],
    gamma: f64,
) -> Result<HolrrModel<T>> {
    let m = k.nrows();
    if k.ncols() != m {
        return Err(RegressionError::ShapeMismatch("Gram matrix must be square".into()));
    }
    let ys = y.mode_sizes().to_vec();
    if ys[0] != m {
        return Err(RegressionError::ShapeMismatch(format!(
            "Gram has {m} rows but Y has {} samples",
            ys[0]
        )));
    }
    let n_out = ys.len() - 1;
    if ranks.len() != n_out + 1 {
        return Err(RegressionError::ShapeMismatch(format!(
            "expected {} ranks (R₀ … R_N)",
            n_out + 1
        )));
    }
    let gamma_t = T::from_f64_c(gamma);
    // The sample subspace solves Y₍₁₎Y₍₁₎ᵀK v = λ(K + γI)v. Multiplying by
    // K gives the symmetric-definite pencil (K S K, K² + γK) on range(K),
    // which the K-eigenbasis reduces to an ordinary symmetric problem.
    let ksym = linalg::symmetrize(&k.view());
    let (lam, q) = linalg::eigh_asc(&ksym.view())?;
    let lam_max = lam[m - 1].max(T::epsilon());
    let keep: Vec<usize> = (0..m)
        .filter(|&i| lam[i] > lam_max * T::from_f64_c(1e-12))
        .collect();
    let rk = keep.len();
    if ranks[0] > rk {
        return Err(RegressionError::Singular(
            "requested sample-subspace rank exceeds the Gram rank".into(),
        ));
    }
    let y0 = y.mode_unfolding(0);
    let s = y0.dot(&y0.t()); // M × M
    // restrict to range(K): A' = Λ₊ Q₊ᵀ S Q₊ Λ₊, B' = Λ₊² + γΛ₊
    let mut qplus = Array2::<T>::zeros((m, rk));
    for (jc, &i) in keep.iter().enumerate() {
        qplus.column_mut(jc).assign(&q.column(i));
    }
    let s_tilde = qplus.t().dot(&s).dot(&qplus);
    let mut p = Array2::<T>::zeros((rk, rk));
    for a in 0..rk {
        for b in 0..rk {
            let la = lam[keep[a]];
            let lb = lam[keep[b]];
            let da = (la * la + gamma_t * la).sqrt();
            let db = (lb * lb + gamma_t * lb).sqrt();
            // B'^{-1/2} A' B'^{-1/2}
            p[[a, b]] = la * s_tilde[[a, b]] * lb / (da * db);
        }
    }
    let (pvals, pvecs) = linalg::eigh_asc(&p.view())?;
    let take = ranks[0];
    let mut v = Array2::<T>::zeros((m, take));
    for jcol in 0..take {
        let col = rk - 1 - jcol;
        if pvals[col] <= T::epsilon() {
            return Err(RegressionError::Singular(
                "requested sample-subspace rank exceeds the pencil rank".into(),
            ));
        }
        // w = B'^{-1/2} u, v = Q₊ w
        let u = pvecs.column(col);
        let mut w = Array1::<T>::zeros(rk);
        for a in 0..rk {
            let la = lam[keep[a]];
            w[a] = u[a] / (la * la + gamma_t * la).sqrt();
        }
        let vq = qplus.dot(&w);
        v.column_mut(jcol).assign(&vq);
    }
    let u0 = orthonormalize(&v)?;
    let mut factors = vec![u0];
    for n in 1..=n_out {
        factors.push(mode_subspace(y, n, ranks[n])?);
    }
    // T = (U₀ᵀ K(K + γI) U₀)⁻¹ U₀ᵀ K
    let u0 = &factors[0];
    let kk = ksym.dot(&(&ksym + &(Array2::<T>::eye(m) * gamma_t)));
    let inner = u0.t().dot(&kk).dot(u0);
    let rhs = u0.t().dot(&ksym);
    let t_map = linalg::solve_spd(&inner.view(), &rhs.view())?;
    let mut core = y.mode_product(&t_map, 0)?;
    for n in 1..=n_out {
        core = core.mode_product(&factors[n].t().to_owned(), n)?;
    }
    Ok(HolrrModel { core, factors, gamma, kernelized: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttkit_core::SplitMix64;

    fn linear_data(
        m: usize,
        i0: usize,
        out: &[usize],
        noise: f64,
        seed: u64,
    ) -> (Array2<f64>, DenseTensor<f64>, DenseTensor<f64>) {
        let mut rng = SplitMix64::new(seed);
        let x: Array2<f64> = rng.normal_mat(m, i0);
        let mut wsizes = vec![i0];
        wsizes.extend_from_slice(out);
        let w = DenseTensor::<f64>::random_normal(&wsizes, seed ^ 0xdead);
        // Y(m, j…) = Σ_i x(m,i)·W(i, j…) + noise
        let mut ysizes = vec![m];
        ysizes.extend_from_slice(out);
        let mut y = w.mode_product(&x, 0).unwrap();
        if noise > 0.0 {
            let e = DenseTensor::<f64>::random_normal(&ysizes, seed ^ 0xbeef).scale(noise);
            y = y.add(&e).unwrap();
        }
        (x, y, w)
    }

    #[test]
    fn full_rank_small_gamma_recovers_linear_map() {
        let (x, y, w) = linear_data(40, 4, &[3, 2], 0.0, 3);
        let model = holrr_fit(&x, &y, &[4, 3, 2], 1e-8).unwrap();
        // prediction for a fresh input matches the planted map
        let mut rng = SplitMix64::new(99);
        let xs: Array1<f64> = rng.normal_vec(4);
        let want = w.vec_product(&xs, 0).unwrap();
        let got = model.predict(&xs).unwrap();
        assert!(got.rel_err(&want) < 1e-6, "err {}", got.rel_err(&want));
        for u in &model.factors {
            let g = u.t().dot(u);
            let eye = Array2::<f64>::eye(g.nrows());
            assert!((&g - &eye).iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn zero_response_gives_zero_model() {
        let mut rng = SplitMix64::new(5);
        let x: Array2<f64> = rng.normal_mat(20, 3);
        let y = DenseTensor::<f64>::zeros(&[20, 2, 2]);
        let model = holrr_fit(&x, &y, &[2, 2, 2], 1e-6).unwrap();
        assert!(model.core.fro_norm() < 1e-12);
        let xs: Array1<f64> = rng.normal_vec(3);
        assert!(model.predict(&xs).unwrap().fro_norm() < 1e-12);
    }

    #[test]
    fn low_rank_planted_model_generalizes() {
        // W with multilinear ranks (2,2,2); σ = 0.01 noise; test RMSE ≤ 3σ
        let mut rng = SplitMix64::new(10);
        let m = 200;
        let i0 = 6;
        let out = [4usize, 4];
        let core = DenseTensor::<f64>::random_normal(&[2, 2, 2], 1);
        let f0: Array2<f64> = rng.normal_mat(i0, 2);
        let f1: Array2<f64> = rng.normal_mat(out[0], 2);
        let f2: Array2<f64> = rng.normal_mat(out[1], 2);
        let w = core
            .mode_product(&f0, 0)
            .unwrap()
            .mode_product(&f1, 1)
            .unwrap()
            .mode_product(&f2, 2)
            .unwrap();
        let x: Array2<f64> = rng.normal_mat(m, i0);
        let sigma = 0.01;
        let clean = w.mode_product(&x, 0).unwrap();
        let noise = DenseTensor::<f64>::random_normal(clean.mode_sizes(), 7).scale(sigma);
        let y = clean.add(&noise).unwrap();
        let model = holrr_fit(&x, &y, &[2, 2, 2], 1e-4).unwrap();
        // held-out evaluation
        let xt: Array2<f64> = rng.normal_mat(50, i0);
        let truth = w.mode_product(&xt, 0).unwrap();
        let mut sse = 0.0;
        let mut count = 0.0;
        for s in 0..50 {
            let pred = model.predict(&xt.row(s).to_owned()).unwrap();
            for j0 in 0..out[0] {
                for j1 in 0..out[1] {
                    let d = pred.get(&[j0, j1]) - truth.get(&[s, j0, j1]);
                    sse += d * d;
                    count += 1.0;
                }
            }
        }
        let rmse = (sse / count).sqrt();
        assert!(rmse <= 3.0 * sigma, "test rmse {rmse}");
    }

    #[test]
    fn kernelized_linear_kernel_matches_plain() {
        let (x, y, _) = linear_data(25, 4, &[3, 2], 0.005, 8);
        let gamma = 1e-3;
        let plain = holrr_fit(&x, &y, &[3, 2, 2], gamma).unwrap();
        let gram = x.dot(&x.t());
        let kern = kholrr_fit(&gram, &y, &[3, 2, 2], gamma).unwrap();
        let mut rng = SplitMix64::new(123);
        for _ in 0..5 {
            let xs: Array1<f64> = rng.normal_vec(4);
            let kx = x.dot(&xs);
            let a = plain.predict(&xs).unwrap();
            let b = kern.predict(&kx).unwrap();
            assert!(a.rel_err(&b) < 1e-6, "mismatch {}", a.rel_err(&b));
        }
    }

    #[test]
    fn gamma_zero_with_singular_design_is_rejected() {
        let mut rng = SplitMix64::new(2);
        let thin: Array2<f64> = rng.normal_mat(10, 1);
        let ones = Array2::<f64>::ones((1, 4));
        let x = thin.dot(&ones); // rank-1 design, 4 columns
        let y = DenseTensor::<f64>::random_normal(&[10, 2], 3);
        let err = holrr_fit(&x, &y, &[2, 2], 0.0);
        assert!(matches!(err, Err(RegressionError::Singular(_))));
    }
}
