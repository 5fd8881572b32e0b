//! Tangent space of the fixed-TT-rank manifold.
//!
//! A point `x` with interior ranks `R` is carried in two gauges: all-left
//! orthogonal cores `Uₙ` and all-right orthogonal cores `Vₙ`. A tangent
//! vector is parameterized by variation cores `δₙ`,
//!
//! ```text
//! δX = Σₙ U₁ ⋯ Uₙ₋₁ · δₙ · Vₙ₊₁ ⋯ V_N,
//! ```
//!
//! with the left-gauge condition `(Uₙᴸ)ᵀ δₙᴸ = 0` for `n < N`, which makes
//! the parametrization unique and the embedded ranks at most `2R`. Under
//! this gauge the tangent inner product is `Σₙ ⟨δₙ, δₙ′⟩`.

use crate::error::{Result, RiemannianError};
use ndarray::{s, Array2, Array3};
use ttkit_core::tt::{fold_left, left_unfold};
use ttkit_core::{Scalar, TTTrain};

/// Precomputed gauges of the base point.
#[derive(Clone, Debug)]
pub struct TangentSpace<T> {
    /// All-left-orthogonal gauge (the last core carries the weight).
    u_cores: Vec<Array3<T>>,
    /// All-right-orthogonal gauge (the first core carries the weight).
    v_cores: Vec<Array3<T>>,
    mode_sizes: Vec<usize>,
    ranks: Vec<usize>,
}

/// Variation cores at a base point.
#[derive(Clone, Debug)]
pub struct TangentVector<T> {
    pub deltas: Vec<Array3<T>>,
}

impl<T: Scalar> TangentVector<T> {
    pub fn zeros_like(space: &TangentSpace<T>) -> Self {
        let deltas = space
            .u_cores
            .iter()
            .map(|c| Array3::zeros(c.dim()))
            .collect();
        Self { deltas }
    }

    pub fn scale(&self, a: T) -> Self {
        Self { deltas: self.deltas.iter().map(|d| d.mapv(|v| v * a)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            deltas: self
                .deltas
                .iter()
                .zip(other.deltas.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Euclidean inner product (valid thanks to the gauge conditions).
    pub fn dot(&self, other: &Self) -> T {
        self.deltas
            .iter()
            .zip(other.deltas.iter())
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum::<T>())
            .sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).max(T::zero()).sqrt()
    }
}

impl<T: Scalar> TangentSpace<T> {
    /// Builds both gauges of the base point.
    pub fn at(x: &TTTrain<T>) -> Result<Self> {
        let n = x.order();
        let left = x.orthogonalize(n - 1)?;
        let right = x.orthogonalize(0)?;
        if left.ranks() != right.ranks() {
            return Err(RiemannianError::DegenerateRanks(format!(
                "gauge rank chains differ: {:?} vs {:?} (rank-deficient cores)",
                left.ranks(),
                right.ranks()
            )));
        }
        Ok(Self {
            mode_sizes: x.mode_sizes(),
            ranks: left.ranks(),
            u_cores: left.into_cores(),
            v_cores: right.into_cores(),
        })
    }

    pub fn mode_sizes(&self) -> &[usize] {
        &self.mode_sizes
    }

    pub fn interior_ranks(&self) -> Vec<usize> {
        self.ranks[1..self.ranks.len() - 1].to_vec()
    }

    /// The base point itself (from the left gauge).
    pub fn base(&self) -> TTTrain<T> {
        TTTrain::new(self.u_cores.clone()).expect("valid chain")
    }

    /// Orthogonal projection of an arbitrary train onto the tangent space.
    pub fn project(&self, z: &TTTrain<T>) -> Result<TangentVector<T>> {
        if z.mode_sizes() != self.mode_sizes {
            return Err(RiemannianError::ShapeMismatch(format!(
                "modes {:?} vs base {:?}",
                z.mode_sizes(),
                self.mode_sizes
            )));
        }
        let n = self.u_cores.len();
        // left overlaps of the U-prefix with z, right overlaps of the
        // V-suffix with z
        let mut lefts: Vec<Array2<T>> = Vec::with_capacity(n + 1);
        lefts.push(Array2::from_shape_fn((1, 1), |_| T::one()));
        for k in 0..n {
            let u = &self.u_cores[k];
            let zc = z.core(k);
            let (ru0, i_sz, ru1) = u.dim();
            let (rz0, _, rz1) = zc.dim();
            let prev = &lefts[k];
            let mut next = Array2::zeros((ru1, rz1));
            for a1 in 0..ru1 {
                for b1 in 0..rz1 {
                    let mut acc = T::zero();
                    for a in 0..ru0 {
                        for b in 0..rz0 {
                            for i in 0..i_sz {
                                acc = acc + prev[[a, b]] * u[[a, i, a1]] * zc[[b, i, b1]];
                            }
                        }
                    }
                    next[[a1, b1]] = acc;
                }
            }
            lefts.push(next);
        }
        let mut rights: Vec<Array2<T>> = vec![Array2::from_shape_fn((1, 1), |_| T::one()); n + 1];
        for k in (0..n).rev() {
            let v = &self.v_cores[k];
            let zc = z.core(k);
            let (rv0, i_sz, rv1) = v.dim();
            let (rz0, _, rz1) = zc.dim();
            let nxt = &rights[k + 1];
            let mut cur = Array2::zeros((rv0, rz0));
            for a in 0..rv0 {
                for b in 0..rz0 {
                    let mut acc = T::zero();
                    for a1 in 0..rv1 {
                        for b1 in 0..rz1 {
                            for i in 0..i_sz {
                                acc = acc + v[[a, i, a1]] * zc[[b, i, b1]] * nxt[[a1, b1]];
                            }
                        }
                    }
                    cur[[a, b]] = acc;
                }
            }
            rights[k] = cur;
        }
        // raw deltas, then the left-gauge projection for all but the last
        let mut deltas = Vec::with_capacity(n);
        for k in 0..n {
            let (r0, i_sz, r1) = self.u_cores[k].dim();
            let zc = z.core(k);
            let (rz0, _, rz1) = zc.dim();
            let mut delta = Array3::zeros((r0, i_sz, r1));
            for a in 0..r0 {
                for i in 0..i_sz {
                    for b in 0..r1 {
                        let mut acc = T::zero();
                        for p in 0..rz0 {
                            for q in 0..rz1 {
                                acc = acc
                                    + lefts[k][[a, p]] * zc[[p, i, q]] * rights[k + 1][[b, q]];
                            }
                        }
                        delta[[a, i, b]] = acc;
                    }
                }
            }
            if k < n - 1 {
                let u_l = left_unfold(&self.u_cores[k]);
                let d_l = left_unfold(&delta);
                let coeff = u_l.t().dot(&d_l);
                let proj = d_l - u_l.dot(&coeff);
                delta = fold_left(proj, r0, i_sz);
            }
            deltas.push(delta);
        }
        Ok(TangentVector { deltas })
    }

    /// Embeds a tangent vector as a TT train with ranks at most `2R`.
    pub fn embed(&self, v: &TangentVector<T>) -> Result<TTTrain<T>> {
        let n = self.u_cores.len();
        if n == 1 {
            return Ok(TTTrain::new(vec![v.deltas[0].clone()])?);
        }
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let u = &self.u_cores[k];
            let vc = &self.v_cores[k];
            let d = &v.deltas[k];
            let (r0, i_sz, r1) = u.dim();
            let core = if k == 0 {
                // [δ₁ | U₁]
                let mut c = Array3::zeros((1, i_sz, 2 * r1));
                c.slice_mut(s![.., .., ..r1]).assign(d);
                c.slice_mut(s![.., .., r1..]).assign(u);
                c
            } else if k == n - 1 {
                // [V_N ; δ_N]
                let mut c = Array3::zeros((2 * r0, i_sz, 1));
                c.slice_mut(s![..r0, .., ..]).assign(vc);
                c.slice_mut(s![r0.., .., ..]).assign(d);
                c
            } else {
                // [[Vₙ, 0], [δₙ, Uₙ]]
                let mut c = Array3::zeros((2 * r0, i_sz, 2 * r1));
                c.slice_mut(s![..r0, .., ..r1]).assign(vc);
                c.slice_mut(s![r0.., .., ..r1]).assign(d);
                c.slice_mut(s![r0.., .., r1..]).assign(u);
                c
            };
            cores.push(core);
        }
        Ok(TTTrain::new(cores)?)
    }
}

/// Convenience wrapper: projection at a freshly prepared base point.
pub fn tangent_project<T: Scalar>(
    x: &TTTrain<T>,
    z: &TTTrain<T>,
) -> Result<(TangentSpace<T>, TangentVector<T>)> {
    let space = TangentSpace::at(x)?;
    let v = space.project(z)?;
    Ok((space, v))
}

/// Retraction to the manifold: rounds `x + α·v` back to the ranks of `x`.
/// `α = 0` or a zero tangent vector returns the base point unchanged.
pub fn retract<T: Scalar>(
    space: &TangentSpace<T>,
    v: &TangentVector<T>,
    alpha: T,
) -> Result<TTTrain<T>> {
    if alpha == T::zero() || v.norm() == T::zero() {
        return Ok(space.base());
    }
    let step = space.embed(&v.scale(alpha))?;
    let moved = space.base().add(&step)?;
    let caps = space.interior_ranks();
    if caps.is_empty() {
        return Ok(moved.round(T::zero(), usize::MAX)?);
    }
    Ok(moved.round_with_caps(T::zero(), &caps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttkit_core::DenseTensor;

    fn base(seed: u64) -> TTTrain<f64> {
        TTTrain::random(&[3, 4, 3, 2], &[2, 3, 2], seed).unwrap()
    }

    #[test]
    fn base_point_is_its_own_tangent_embedding() {
        let x = base(3);
        let (space, v) = tangent_project(&x, &x).unwrap();
        let emb = space.embed(&v).unwrap();
        assert!(emb.rel_err_dense(&x) < 1e-10, "err {}", emb.rel_err_dense(&x));
    }

    #[test]
    fn projection_is_idempotent() {
        let x = base(5);
        let z = TTTrain::random(&[3, 4, 3, 2], &[3, 3, 3], 11).unwrap();
        let (space, v1) = tangent_project(&x, &z).unwrap();
        let v2 = space.project(&space.embed(&v1).unwrap()).unwrap();
        let diff = v1.add(&v2.scale(-1.0)).norm();
        assert!(diff < 1e-10 * v1.norm().max(1.0), "diff {diff}");
    }

    #[test]
    fn residual_is_orthogonal_to_the_projection() {
        let x = base(7);
        let z = TTTrain::random(&[3, 4, 3, 2], &[2, 2, 2], 13).unwrap();
        let (space, v) = tangent_project(&x, &z).unwrap();
        let pz = space.embed(&v).unwrap();
        let rz = z.sub(&pz).unwrap();
        let ip = rz.dot(&pz).unwrap();
        let zn = z.norm();
        assert!(ip.abs() <= 1e-9 * zn * zn, "⟨z − Pz, Pz⟩ = {ip}");
        // embedded ranks at most twice the base ranks
        for (re, rb) in pz.interior_ranks().iter().zip(x.interior_ranks().iter()) {
            assert!(re <= &(2 * rb));
        }
    }

    #[test]
    fn projection_matches_dense_tangent_basis_on_tiny_case() {
        // 2×2 rank-1 manifold: build the dense tangent projector from an
        // explicit basis and compare
        let x = TTTrain::<f64>::random(&[2, 2], &[1], 3).unwrap();
        let space = TangentSpace::at(&x).unwrap();
        // basis of the tangent space: embeddings of unit deltas
        let mut basis: Vec<ndarray::Array1<f64>> = Vec::new();
        for k in 0..2 {
            let dims = space.u_cores[k].dim();
            for a in 0..dims.0 {
                for i in 0..dims.1 {
                    for b in 0..dims.2 {
                        let mut v = TangentVector::zeros_like(&space);
                        v.deltas[k][[a, i, b]] = 1.0;
                        // re-project to enforce the gauge
                        let emb = space.embed(&v).unwrap();
                        basis.push(ndarray::Array1::from(emb.contract_full().to_vec()));
                    }
                }
            }
        }
        // orthonormalize the spanning set densely
        let mut mat = ndarray::Array2::<f64>::zeros((4, basis.len()));
        for (j, b) in basis.iter().enumerate() {
            mat.column_mut(j).assign(b);
        }
        let (u, s, _) = ttkit_core::linalg::svd(&mat.view()).unwrap();
        let rank = s.iter().take_while(|&&sv| sv > 1e-10 * s[0]).count();
        let q = u.slice(ndarray::s![.., ..rank]);
        let dense_projector = q.dot(&q.t());

        let z = DenseTensor::<f64>::random_normal(&[2, 2], 9);
        let z_tt = TTTrain::tt_svd(&z, 0.0, usize::MAX).unwrap();
        let v = space.project(&z_tt).unwrap();
        let got = ndarray::Array1::from(space.embed(&v).unwrap().contract_full().to_vec());
        let want = dense_projector.dot(&ndarray::Array1::from(z.to_vec()));
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn retraction_identities() {
        let x = base(9);
        let z = TTTrain::random(&[3, 4, 3, 2], &[2, 2, 2], 17).unwrap();
        let (space, v) = tangent_project(&x, &z).unwrap();
        // α = 0 and v = 0 return the base point
        let r0 = retract(&space, &v, 0.0).unwrap();
        assert!(r0.rel_err_dense(&x) < 1e-13);
        let zv = TangentVector::zeros_like(&space);
        let rz = retract(&space, &zv, 1.0).unwrap();
        assert!(rz.rel_err_dense(&x) < 1e-13);
        // ranks preserved
        let r = retract(&space, &v, 0.05).unwrap();
        assert_eq!(r.interior_ranks(), x.interior_ranks());
    }

    #[test]
    fn retraction_is_second_order_accurate() {
        // ‖R(x, αv) − (x + αv)‖ = O(α²): slope of the log-log fit ≈ 2
        let x = base(21);
        let z = TTTrain::random(&[3, 4, 3, 2], &[2, 2, 2], 23).unwrap();
        let (space, v) = tangent_project(&x, &z).unwrap();
        let v = v.scale(1.0 / v.norm());
        let mut errs = Vec::new();
        let alphas = [1e-2, 1e-3, 1e-4];
        for &a in &alphas {
            let lin = space.base().add(&space.embed(&v.scale(a)).unwrap()).unwrap();
            let r = retract(&space, &v, a).unwrap();
            // dense difference avoids the cancellation that a TT inner
            // product suffers at O(α²) scales
            let diff = r
                .contract_full()
                .sub(&lin.contract_full())
                .unwrap()
                .fro_norm();
            errs.push(diff.max(1e-30));
        }
        let slope = (errs[0] / errs[2]).log10() / (alphas[0] / alphas[2]).log10();
        assert!((slope - 2.0).abs() <= 0.3, "slope {slope}, errs {errs:?}");
    }
}
