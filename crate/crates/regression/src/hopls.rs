//! Higher-order partial least squares: joint deflation of predictor and
//! response tensors over a shared latent vector per component, with
//! block-Tucker loadings obtained from the cross-covariance tensor. The
//! rank-one special case is the classic N-way PLS, implemented separately
//! as an independent reference path.

use crate::error::{RegressionError, Result};
use ndarray::{Array1, Array2};
use ttkit_core::{linalg, DenseTensor, Scalar};
use ttkit_solvers::tucker_hooi;

#[derive(Clone, Debug)]
pub struct HoplsComponent<T> {
    pub latent: Array1<T>,
    pub p_loadings: Vec<Array2<T>>,
    pub q_loadings: Vec<Array2<T>>,
    pub core_x: DenseTensor<T>,
    pub core_y: DenseTensor<T>,
}

#[derive(Clone, Debug)]
pub struct HoplsModel<T> {
    pub components: Vec<HoplsComponent<T>>,
    pub x_feature_sizes: Vec<usize>,
    pub y_feature_sizes: Vec<usize>,
    /// Per-component deflation norms `(‖X‖, ‖Y‖)` after extraction.
    pub deflation_trace: Vec<(f64, f64)>,
    pub x_mean: Option<DenseTensor<T>>,
    pub y_mean: Option<DenseTensor<T>>,
}

impl<T: Scalar> HoplsModel<T> {
    /// Prediction matrices: `Ŷ₍₁₎ = X₍₁₎ Wˣ Wʸ` over vectorized features.
    pub fn prediction_matrices(&self) -> (Array2<T>, Array2<T>) {
        let px: usize = self.x_feature_sizes.iter().product();
        let py: usize = self.y_feature_sizes.iter().product();
        let r = self.components.len();
        let mut wx = Array2::<T>::zeros((px, r));
        let mut wy = Array2::<T>::zeros((r, py));
        for (cidx, comp) in self.components.iter().enumerate() {
            // wˣ_r = (⊗ₙ P⁽ⁿ⁾) gₓ†, so the score of a training sample is its
            // latent coordinate; the response side then carries the full
            // core: wʸ_r = ((⊗ₙ Q⁽ⁿ⁾) g_y)ᵀ. The pseudo-inverse uses the
            // 1e−12·σ cutoff (a 1×K core has a single singular value).
            let gx = comp.core_x.to_vec();
            let gy = comp.core_y.to_vec();
            let gx_norm_sq: T = gx.iter().map(|&v| v * v).sum();
            let gx_dag: Vec<T> = if gx_norm_sq.sqrt() > T::from_f64_c(1e-12) {
                gx.iter().map(|&v| v / gx_norm_sq).collect()
            } else {
                vec![T::zero(); gx.len()]
            };
            // expand through the Kronecker-structured loadings
            let col = kron_apply(&comp.p_loadings, &self.x_feature_sizes, &gx_dag);
            for (i, &v) in col.iter().enumerate() {
                wx[[i, cidx]] = v;
            }
            let row = kron_apply(&comp.q_loadings, &self.y_feature_sizes, &gy);
            for (j, &v) in row.iter().enumerate() {
                wy[[cidx, j]] = v;
            }
        }
        (wx, wy)
    }

    /// Predicts the response tensor for one predictor tensor.
    pub fn predict(&self, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
        if x.mode_sizes() != self.x_feature_sizes.as_slice() {
            return Err(RegressionError::ShapeMismatch(format!(
                "predictor modes {:?} vs expected {:?}",
                x.mode_sizes(),
                self.x_feature_sizes
            )));
        }
        let xc = match &self.x_mean {
            Some(mean) => x.sub(mean)?,
            None => x.clone(),
        };
        let (wx, wy) = self.prediction_matrices();
        let xv = Array1::from(xc.to_vec());
        let scores = wx.t().dot(&xv);
        let yv = wy.t().dot(&scores);
        let mut out = DenseTensor::from_vec(&self.y_feature_sizes, yv.to_vec())?;
        if let Some(mean) = &self.y_mean {
            out = out.add(mean)?;
        }
        Ok(out)
    }
}

/// Applies `⊗ₙ (loadings over modes)` to a vectorized core: expands a core
/// vector (column-major over the block ranks) to full feature space.
fn kron_apply<T: Scalar>(
    loadings: &[Array2<T>],
    feature_sizes: &[usize],
    core_vec: &[T],
) -> Vec<T> {
    let rank_sizes: Vec<usize> = loadings.iter().map(|l| l.ncols()).collect();
    let core = DenseTensor::from_vec(&rank_sizes, core_vec.to_vec()).expect("consistent");
    let mut out = core;
    for (n, l) in loadings.iter().enumerate() {
        out = out.mode_product(l, n).expect("consistent");
    }
    debug_assert_eq!(out.mode_sizes(), feature_sizes);
    out.to_vec()
}

/// Cross-covariance tensor over the shared sample mode:
/// `C(i…, j…) = Σ_m X(m, i…)·Y(m, j…)`.
fn cross_covariance<T: Scalar>(x: &DenseTensor<T>, y: &DenseTensor<T>) -> DenseTensor<T> {
    let x0 = x.mode_unfolding(0); // M × ΠI
    let y0 = y.mode_unfolding(0); // M × ΠJ
    let c = x0.t().dot(&y0); // ΠI × ΠJ (both column-major over features)
    let mut sizes: Vec<usize> = x.mode_sizes()[1..].to_vec();
    sizes.extend_from_slice(&y.mode_sizes()[1..]);
    let mut v = Vec::with_capacity(c.len());
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            v.push(c[[i, j]]);
        }
    }
    DenseTensor::from_vec(&sizes, v).expect("consistent")
}

fn center_samples<T: Scalar>(x: &DenseTensor<T>) -> (DenseTensor<T>, DenseTensor<T>) {
    let sizes = x.mode_sizes().to_vec();
    let m = sizes[0];
    let feat = &sizes[1..];
    let unf = x.mode_unfolding(0); // M × rest
    let mut mean = Array1::<T>::zeros(unf.ncols());
    for row in unf.rows() {
        mean.zip_mut_with(&row, |a, &b| *a = *a + b);
    }
    mean.mapv_inplace(|v| v / T::from_f64_c(m as f64));
    let mean_t = DenseTensor::from_vec(feat, mean.to_vec()).expect("consistent");
    let mut centered = x.clone();
    let mut idx = vec![0usize; sizes.len()];
    let total = x.len();
    for flat in 0..total {
        let mut rem = flat;
        for (k, &s) in sizes.iter().enumerate() {
            idx[k] = rem % s;
            rem /= s;
        }
        let mv = mean_t.get(&idx[1..]);
        centered.set(&idx, x.get(&idx) - mv);
    }
    (centered, mean_t)
}

/// Fits `r_components` HOPLS blocks of ranks `(1, Lₙ)` / `(1, Kₙ)`.
#[allow(clippy::too_many_arguments)]
pub fn hopls_fit<T: Scalar>(
    x: &DenseTensor<T>,
    y: &DenseTensor<T>,
    r_components: usize,
    l_ranks: &[usize],
    k_ranks: &[usize],
    hooi_iters: usize,
    center: bool,
) -> Result<HoplsModel<T>> {
    let xs = x.mode_sizes().to_vec();
    let ys = y.mode_sizes().to_vec();
    if xs[0] != ys[0] {
        return Err(RegressionError::ShapeMismatch(format!(
            "sample counts differ: {} vs {}",
            xs[0], ys[0]
        )));
    }
    if l_ranks.len() != xs.len() - 1 || k_ranks.len() != ys.len() - 1 {
        return Err(RegressionError::ShapeMismatch(
            "one block rank per feature mode is required".into(),
        ));
    }
    let (mut xc, x_mean) = if center {
        center_samples(x)
    } else {
        (x.clone(), DenseTensor::zeros(&xs[1..]))
    };
    let (mut yc, y_mean) = if center {
        center_samples(y)
    } else {
        (y.clone(), DenseTensor::zeros(&ys[1..]))
    };
    let mut components = Vec::new();
    let mut deflation_trace = Vec::new();
    for _ in 0..r_components {
        if xc.fro_norm() <= T::from_f64_c(1e-14) || yc.fro_norm() <= T::from_f64_c(1e-14) {
            break;
        }
        let c = cross_covariance(&xc, &yc);
        let mut ranks = l_ranks.to_vec();
        ranks.extend_from_slice(k_ranks);
        let hooi = tucker_hooi(&c, &ranks, hooi_iters)?;
        let nx = l_ranks.len();
        let p_loadings: Vec<Array2<T>> = hooi.factors[..nx].to_vec();
        let q_loadings: Vec<Array2<T>> = hooi.factors[nx..].to_vec();
        // latent vector: dominant left singular vector of the projected X
        let mut xproj = xc.clone();
        for (n, p) in p_loadings.iter().enumerate() {
            xproj = xproj.mode_product(&p.t().to_owned(), n + 1)?;
        }
        let xp0 = xproj.mode_unfolding(0); // M × ΠL
        let gram = xp0.dot(&xp0.t());
        let (_vals, vecs) = linalg::eigh_asc(&gram.view())?;
        let t = vecs.column(vecs.ncols() - 1).to_owned(); // unit norm
        // cores by projection onto the latent vector
        let core_x = {
            let mut g = xproj.clone();
            g = g.vec_product(&t, 0)?;
            g
        };
        let core_y = {
            let mut g = yc.clone();
            for (n, q) in q_loadings.iter().enumerate() {
                g = g.mode_product(&q.t().to_owned(), n + 1)?;
            }
            g.vec_product(&t, 0)?
        };
        // deflation
        let x_hat = {
            let mut g = core_x.clone();
            for (n, p) in p_loadings.iter().enumerate() {
                g = g.mode_product(p, n)?;
            }
            outer_with_vector(&t, &g)
        };
        let y_hat = {
            let mut g = core_y.clone();
            for (n, q) in q_loadings.iter().enumerate() {
                g = g.mode_product(q, n)?;
            }
            outer_with_vector(&t, &g)
        };
        xc = xc.sub(&x_hat)?;
        yc = yc.sub(&y_hat)?;
        deflation_trace.push((
            xc.fro_norm().to_f64().unwrap_or(f64::NAN),
            yc.fro_norm().to_f64().unwrap_or(f64::NAN),
        ));
        components.push(HoplsComponent { latent: t, p_loadings, q_loadings, core_x, core_y });
    }
    Ok(HoplsModel {
        components,
        x_feature_sizes: xs[1..].to_vec(),
        y_feature_sizes: ys[1..].to_vec(),
        deflation_trace,
        x_mean: center.then_some(x_mean),
        y_mean: center.then_some(y_mean),
    })
}

/// `t ∘ G`: prepends the sample mode.
fn outer_with_vector<T: Scalar>(t: &Array1<T>, g: &DenseTensor<T>) -> DenseTensor<T> {
    let mut sizes = vec![t.len()];
    sizes.extend_from_slice(g.mode_sizes());
    let gv = g.to_vec();
    let mut v = Vec::with_capacity(t.len() * gv.len());
    for &gval in &gv {
        for &tval in t.iter() {
            v.push(tval * gval);
        }
    }
    DenseTensor::from_vec(&sizes, v).expect("consistent")
}

/// Rank-one N-way PLS model (independent reference path).
#[derive(Clone, Debug)]
pub struct NwayPlsModel<T> {
    pub latents: Vec<Array1<T>>,
    pub x_loadings: Vec<Vec<Array1<T>>>,
    pub y_loadings: Vec<Vec<Array1<T>>>,
    pub x_weights: Vec<T>,
    pub y_weights: Vec<T>,
}

/// N-way PLS via rank-one cross-covariance factorizations (power iteration,
/// no shared code with the HOPLS/HOOI path).
pub fn n_way_pls<T: Scalar>(
    x: &DenseTensor<T>,
    y: &DenseTensor<T>,
    r_components: usize,
    power_iters: usize,
) -> Result<NwayPlsModel<T>> {
    let xs = x.mode_sizes().to_vec();
    let ys = y.mode_sizes().to_vec();
    if xs[0] != ys[0] {
        return Err(RegressionError::ShapeMismatch("sample counts differ".into()));
    }
    let mut xc = x.clone();
    let mut yc = y.clone();
    let mut latents = Vec::new();
    let mut x_loadings = Vec::new();
    let mut y_loadings = Vec::new();
    let mut x_weights = Vec::new();
    let mut y_weights = Vec::new();
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    for comp in 0..r_components {
        let c = cross_covariance(&xc, &yc);
        let _ = comp;
        // rank-one factors of C by cyclic power iteration, started from the
        // dominant singular vector of each mode unfolding
        let mut factors: Vec<Array1<T>> = (0..c.order())
            .map(|k| {
                let unf = c.mode_unfolding(k);
                let gram = unf.dot(&unf.t());
                let (_vals, vecs) = linalg::eigh_asc(&gram.view()).expect("gram eigh");
                vecs.column(vecs.ncols() - 1).to_owned()
            })
            .collect();
        for _ in 0..power_iters {
            for k in 0..factors.len() {
                let mut contracted = c.clone();
                // contract all modes but k, highest mode first so the
                // positions of the remaining modes stay put
                for j in (0..factors.len()).rev() {
                    if j == k {
                        continue;
                    }
                    contracted = contracted.vec_product(&factors[j], j)?;
                }
                let v = Array1::from(contracted.to_vec());
                let n = v.iter().map(|&a| a * a).sum::<T>().sqrt();
                if n > T::zero() {
                    factors[k] = v.mapv(|a| a / n);
                }
            }
        }
        let p: Vec<Array1<T>> = factors[..nx].to_vec();
        let q: Vec<Array1<T>> = factors[nx..nx + ny].to_vec();
        // latent: t ∝ X ×̄ₙ pₙ
        let mut tproj = xc.clone();
        for pv in p.iter().rev() {
            let mode = tproj.order() - 1;
            tproj = tproj.vec_product(pv, mode)?;
        }
        let mut t = Array1::from(tproj.to_vec());
        let tn = t.iter().map(|&a| a * a).sum::<T>().sqrt();
        if tn > T::zero() {
            t.mapv_inplace(|a| a / tn);
        }
        // scalar cores
        let mut gx = xc.vec_product(&t, 0)?;
        for pv in &p {
            gx = gx.vec_product(pv, 0)?;
        }
        let dx = gx.get(&[0]);
        let mut gy = yc.vec_product(&t, 0)?;
        for qv in &q {
            gy = gy.vec_product(qv, 0)?;
        }
        let dy = gy.get(&[0]);
        // deflate
        let mut xhat_core = DenseTensor::from_vec(&[1], vec![dx])?;
        for pv in &p {
            xhat_core = xhat_core.outer(&rank1(pv));
        }
        let xhat = outer_with_vector(&t, &strip_lead(&xhat_core));
        let mut yhat_core = DenseTensor::from_vec(&[1], vec![dy])?;
        for qv in &q {
            yhat_core = yhat_core.outer(&rank1(qv));
        }
        let yhat = outer_with_vector(&t, &strip_lead(&yhat_core));
        xc = xc.sub(&xhat)?;
        yc = yc.sub(&yhat)?;
        latents.push(t);
        x_loadings.push(p);
        y_loadings.push(q);
        x_weights.push(dx);
        y_weights.push(dy);
    }
    Ok(NwayPlsModel { latents, x_loadings, y_loadings, x_weights, y_weights })
}

fn rank1<T: Scalar>(v: &Array1<T>) -> DenseTensor<T> {
    DenseTensor::from_vec(&[v.len()], v.to_vec()).expect("consistent")
}

/// Drops the leading singleton mode produced by the scalar bootstrap.
fn strip_lead<T: Scalar>(x: &DenseTensor<T>) -> DenseTensor<T> {
    let sizes = &x.mode_sizes()[1..];
    DenseTensor::from_vec(sizes, x.to_vec()).expect("consistent")
}
