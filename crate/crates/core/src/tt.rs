//! Tensor trains: construction (TT-SVD), rounding, orthogonalization,
//! arithmetic and contraction.

use crate::dense::DenseTensor;
use crate::error::{CoreError, Result};
use crate::linalg;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use ndarray::{s, Array1, Array2, Array3, Axis};

/// Left unfolding `(Rₙ₋₁·Iₙ) × Rₙ` of a core (row pair `(a, i)`, `i` fastest).
pub fn left_unfold<T: Scalar>(core: &Array3<T>) -> Array2<T> {
    let (r0, i, r1) = core.dim();
    core.as_standard_layout()
        .to_owned()
        .into_shape_with_order((r0 * i, r1))
        .expect("standard layout")
}

/// Right unfolding `Rₙ₋₁ × (Iₙ·Rₙ)` of a core (column pair `(i, b)`, `b` fastest).
pub fn right_unfold<T: Scalar>(core: &Array3<T>) -> Array2<T> {
    let (r0, i, r1) = core.dim();
    core.as_standard_layout()
        .to_owned()
        .into_shape_with_order((r0, i * r1))
        .expect("standard layout")
}

/// Inverse of [`left_unfold`].
pub fn fold_left<T: Scalar>(m: Array2<T>, r0: usize, i: usize) -> Array3<T> {
    let r1 = m.ncols();
    m.as_standard_layout()
        .to_owned()
        .into_shape_with_order((r0, i, r1))
        .expect("standard layout")
}

/// Inverse of [`right_unfold`].
pub fn fold_right<T: Scalar>(m: Array2<T>, i: usize, r1: usize) -> Array3<T> {
    let r0 = m.nrows();
    m.as_standard_layout()
        .to_owned()
        .into_shape_with_order((r0, i, r1))
        .expect("standard layout")
}

/// Column-major vectorization of a core: index `a + Rₙ₋₁·(i + Iₙ·b)`.
pub fn core_to_vec<T: Scalar>(core: &Array3<T>) -> Array1<T> {
    let (r0, i, r1) = core.dim();
    let mut v = Array1::zeros(r0 * i * r1);
    for a in 0..r0 {
        for ii in 0..i {
            for b in 0..r1 {
                v[a + r0 * (ii + i * b)] = core[[a, ii, b]];
            }
        }
    }
    v
}

/// Inverse of [`core_to_vec`].
pub fn core_from_vec<T: Scalar>(v: &Array1<T>, r0: usize, i: usize, r1: usize) -> Result<Array3<T>> {
    if v.len() != r0 * i * r1 {
        return Err(CoreError::ShapeMismatch(format!(
            "vector length {} vs core shape ({r0}, {i}, {r1})",
            v.len()
        )));
    }
    let mut core = Array3::zeros((r0, i, r1));
    for a in 0..r0 {
        for ii in 0..i {
            for b in 0..r1 {
                core[[a, ii, b]] = v[a + r0 * (ii + i * b)];
            }
        }
    }
    Ok(core)
}

/// A vector/tensor in TT format: a chain of third-order cores with boundary
/// ranks one.
///
/// `orth_pivot` tracks the orthogonality state established by the last
/// structural operation: when `Some(p)`, cores left of `p` have orthonormal
/// left unfoldings and cores right of `p` have orthonormal right unfoldings.
#[derive(Clone, Debug)]
pub struct TTTrain<T> {
    cores: Vec<Array3<T>>,
    orth_pivot: Option<usize>,
}

impl<T: Scalar> TTTrain<T> {
    /// Validates the rank chain and wraps the cores.
    pub fn new(cores: Vec<Array3<T>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().2 != 1 {
            return Err(CoreError::ShapeMismatch(
                "boundary ranks must be one".into(),
            ));
        }
        for w in cores.windows(2) {
            if w[0].dim().2 != w[1].dim().0 {
                return Err(CoreError::ShapeMismatch(format!(
                    "rank chain broken: {} vs {}",
                    w[0].dim().2,
                    w[1].dim().0
                )));
            }
        }
        if cores.iter().any(|c| c.dim().1 == 0 || c.dim().0 == 0 || c.dim().2 == 0) {
            return Err(CoreError::EmptyTensor);
        }
        Ok(Self { cores, orth_pivot: None })
    }

    fn with_pivot(cores: Vec<Array3<T>>, pivot: Option<usize>) -> Self {
        Self { cores, orth_pivot: pivot }
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    /// Full rank chain `R₀, …, R_N` (length `N + 1`).
    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(1);
        r
    }

    /// Interior ranks `R₁, …, R_{N−1}`.
    pub fn interior_ranks(&self) -> Vec<usize> {
        self.cores[..self.order() - 1].iter().map(|c| c.dim().2).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.interior_ranks().into_iter().max().unwrap_or(1)
    }

    pub fn core(&self, n: usize) -> &Array3<T> {
        &self.cores[n]
    }

    pub fn cores(&self) -> &[Array3<T>] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<Array3<T>> {
        self.cores
    }

    /// Replaces core `n`, clearing the orthogonality marker.
    pub fn set_core(&mut self, n: usize, core: Array3<T>) -> Result<()> {
        let (r0, _, r1) = self.cores[n].dim();
        if core.dim().0 != r0 || core.dim().2 != r1 {
            return Err(CoreError::ShapeMismatch(format!(
                "core {} rank mismatch: ({}, {}) vs ({}, {})",
                n,
                core.dim().0,
                core.dim().2,
                r0,
                r1
            )));
        }
        self.cores[n] = core;
        self.orth_pivot = None;
        Ok(())
    }

    /// The orthogonality pivot established by the last structural operation.
    pub fn orth_pivot(&self) -> Option<usize> {
        self.orth_pivot
    }

    pub fn num_parameters(&self) -> usize {
        self.cores.iter().map(|c| c.len()).sum()
    }

    /// Zero tensor with all interior ranks equal to one.
    pub fn zeros(mode_sizes: &[usize]) -> Self {
        let cores = mode_sizes.iter().map(|&i| Array3::zeros((1, i, 1))).collect();
        Self::with_pivot(cores, Some(0))
    }

    /// Rank-one train from one vector per mode.
    pub fn from_rank_one(factors: &[Array1<T>]) -> Result<Self> {
        if factors.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        let cores = factors
            .iter()
            .map(|f| {
                Array3::from_shape_fn((1, f.len(), 1), |(_, i, _)| f[i])
            })
            .collect();
        Self::new(cores)
    }

    /// Seeded Gaussian cores with the requested interior ranks (clamped to
    /// feasible values).
    pub fn random(mode_sizes: &[usize], interior_ranks: &[usize], seed: u64) -> Result<Self> {
        if mode_sizes.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        if interior_ranks.len() + 1 != mode_sizes.len() {
            return Err(CoreError::ShapeMismatch(format!(
                "expected {} interior ranks, got {}",
                mode_sizes.len() - 1,
                interior_ranks.len()
            )));
        }
        let ranks = clamp_ranks(mode_sizes, interior_ranks);
        let mut rng = SplitMix64::new(seed);
        let n = mode_sizes.len();
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let r0 = if k == 0 { 1 } else { ranks[k - 1] };
            let r1 = if k == n - 1 { 1 } else { ranks[k] };
            cores.push(rng.normal_core(r0, mode_sizes[k], r1));
        }
        Self::new(cores)
    }

    /// TT-SVD of a dense tensor.
    ///
    /// The result reconstructs `x` to relative Frobenius error at most `tol`
    /// with every interior rank at most `max_rank`, and is returned with all
    /// cores right-orthogonal except the first (pivot 0).
    pub fn tt_svd(x: &DenseTensor<T>, tol: T, max_rank: usize) -> Result<Self> {
        if x.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        if tol < T::zero() {
            return Err(CoreError::InvalidArgument("tolerance must be nonnegative".into()));
        }
        let sizes = x.mode_sizes().to_vec();
        let n = sizes.len();
        if x.fro_norm() == T::zero() {
            return Ok(Self::zeros(&sizes));
        }
        if n == 1 {
            let core = Array3::from_shape_fn((1, sizes[0], 1), |(_, i, _)| x.get(&[i]));
            return Ok(Self::with_pivot(vec![core], Some(0)));
        }
        let delta = tol / T::from_f64_c(((n - 1) as f64).sqrt());
        let mut cores: Vec<Array3<T>> = Vec::with_capacity(n);
        // Peel modes from the right so the first core absorbs the weights.
        let v = x.to_vec();
        let mut left_rows: usize = sizes[..n - 1].iter().product();
        let mut cur = Array2::zeros((left_rows, sizes[n - 1]));
        for c in 0..sizes[n - 1] {
            for r in 0..left_rows {
                cur[[r, c]] = v[r + left_rows * c];
            }
        }
        let mut r_right = 1usize; // rank to the right of the peeled mode
        for k in (1..n).rev() {
            let i_k = sizes[k];
            let (u, sv, vt) = linalg::svd_trunc(&cur.view(), delta, max_rank)?;
            let r_new = sv.len();
            // Core k from Vt: columns pair (i, b) with b fastest in C order.
            let core = vt
                .into_shape_with_order((r_new, r_right, i_k))
                .expect("contiguous")
                .permuted_axes([0, 2, 1])
                .as_standard_layout()
                .to_owned();
            cores.push(core);
            // Carry U·diag(s) into the next unfolding.
            let mut w = u;
            for (j, mut col) in w.axis_iter_mut(Axis(1)).enumerate() {
                col.mapv_inplace(|x| x * sv[j]);
            }
            if k == 1 {
                cores.push(fold_left(w, 1, sizes[0]));
            } else {
                let i_prev = sizes[k - 1];
                left_rows /= i_prev;
                let mut next = Array2::zeros((left_rows, i_prev * r_new));
                for r in 0..r_new {
                    for i in 0..i_prev {
                        next.slice_mut(s![.., i + i_prev * r])
                            .assign(&w.slice(s![left_rows * i..left_rows * (i + 1), r]));
                    }
                }
                cur = next;
            }
            r_right = r_new;
        }
        cores.reverse();
        Ok(Self::with_pivot(cores, Some(0)))
    }

    /// TT rounding with one rank cap per interior bond (bond `k` sits
    /// between cores `k` and `k + 1`). Never increases any rank.
    pub fn round_with_caps(&self, tol: T, caps: &[usize]) -> Result<Self> {
        if caps.len() + 1 != self.order() && self.order() > 1 {
            return Err(CoreError::ShapeMismatch(format!(
                "expected {} bond caps, got {}",
                self.order() - 1,
                caps.len()
            )));
        }
        self.round_impl(tol, |bond| caps[bond])
    }

    /// TT rounding: re-compression at relative tolerance `tol` with a rank
    /// cap. Never increases any rank; the result carries pivot 0.
    pub fn round(&self, tol: T, max_rank: usize) -> Result<Self> {
        self.round_impl(tol, |_| max_rank)
    }

    fn round_impl(&self, tol: T, cap: impl Fn(usize) -> usize) -> Result<Self> {
        if tol < T::zero() {
            return Err(CoreError::InvalidArgument("tolerance must be nonnegative".into()));
        }
        let n = self.order();
        if n == 1 {
            return Ok(self.clone());
        }
        if self.cores.iter().all(|c| c.iter().all(|&v| v == T::zero())) {
            return Ok(Self::zeros(&self.mode_sizes()));
        }
        // Long chains can carry Frobenius norms beyond the floating-point
        // range, so the running weight is renormalized at every step and the
        // accumulated log-scale is re-applied to the pivot core at the end.
        let mut log_scale = T::zero();
        // Left-to-right QR sweep: all cores left-orthogonal, weight in core N−1.
        let mut cores = self.cores.clone();
        for k in 0..n - 1 {
            let (r0, i, _) = cores[k].dim();
            let (q, mut r) = linalg::qr_thin(&left_unfold(&cores[k]).view())?;
            let rn = linalg::fro_norm(&r.view());
            if rn > T::zero() {
                r.mapv_inplace(|x| x / rn);
                log_scale = log_scale + rn.ln();
            }
            cores[k] = fold_left(q, r0, i);
            let next = r.dot(&right_unfold(&cores[k + 1]));
            let (_, i1, r2) = cores[k + 1].dim();
            cores[k + 1] = fold_right(next, i1, r2);
        }
        // Right-to-left truncated SVD sweep.
        let delta = tol / T::from_f64_c(((n - 1) as f64).sqrt());
        for k in (1..n).rev() {
            let (_, i, r1) = cores[k].dim();
            let m = right_unfold(&cores[k]);
            let (u, sv, vt) = linalg::svd_trunc(&m.view(), delta, cap(k - 1))?;
            cores[k] = fold_right(vt, i, r1);
            let mut w = u;
            for (j, mut col) in w.axis_iter_mut(Axis(1)).enumerate() {
                col.mapv_inplace(|x| x * sv[j]);
            }
            let wn = linalg::fro_norm(&w.view());
            if wn > T::zero() {
                w.mapv_inplace(|x| x / wn);
                log_scale = log_scale + wn.ln();
            }
            let absorbed = left_unfold(&cores[k - 1]).dot(&w);
            let (r0p, ip, _) = cores[k - 1].dim();
            cores[k - 1] = fold_left(absorbed, r0p, ip);
        }
        let scale = log_scale.exp();
        cores[0].mapv_inplace(|x| x * scale);
        Ok(Self::with_pivot(cores, Some(0)))
    }

    /// Re-orthogonalizes so cores left of `pivot` are left-orthogonal and
    /// cores right of it are right-orthogonal. The represented tensor is
    /// unchanged.
    pub fn orthogonalize(&self, pivot: usize) -> Result<Self> {
        let n = self.order();
        if pivot >= n {
            return Err(CoreError::InvalidArgument(format!(
                "pivot {pivot} outside 0..{n}"
            )));
        }
        let mut cores = self.cores.clone();
        for k in 0..pivot {
            let (r0, i, _) = cores[k].dim();
            let (q, r) = linalg::qr_thin(&left_unfold(&cores[k]).view())?;
            cores[k] = fold_left(q, r0, i);
            let next = r.dot(&right_unfold(&cores[k + 1]));
            let (_, i1, r2) = cores[k + 1].dim();
            cores[k + 1] = fold_right(next, i1, r2);
        }
        for k in ((pivot + 1)..n).rev() {
            let (_, i, r1) = cores[k].dim();
            let (l, q) = linalg::lq_thin(&right_unfold(&cores[k]).view())?;
            cores[k] = fold_right(q, i, r1);
            let prev = left_unfold(&cores[k - 1]).dot(&l);
            let (r0p, ip, _) = cores[k - 1].dim();
            cores[k - 1] = fold_left(prev, r0p, ip);
        }
        Ok(Self::with_pivot(cores, Some(pivot)))
    }

    /// Dense reconstruction through sequential slice products.
    pub fn contract_full(&self) -> DenseTensor<T> {
        let sizes = self.mode_sizes();
        let mut acc: Array2<T> = {
            let c = &self.cores[0];
            let (_, i, r1) = c.dim();
            Array2::from_shape_fn((i, r1), |(a, b)| c[[0, a, b]])
        };
        for core in &self.cores[1..] {
            let (r0, i, r1) = core.dim();
            let m = acc.nrows();
            let mut next = Array2::zeros((m * i, r1));
            for ii in 0..i {
                let slice = core.slice(s![.., ii, ..]);
                let block = acc.dot(&slice);
                next.slice_mut(s![m * ii..m * (ii + 1), ..]).assign(&block);
            }
            acc = next;
            let _ = r0;
        }
        let v: Vec<T> = acc.column(0).to_vec();
        DenseTensor::from_vec(&sizes, v).expect("consistent shape")
    }

    /// Single entry without full reconstruction.
    pub fn eval_at(&self, idx: &[usize]) -> Result<T> {
        if idx.len() != self.order() {
            return Err(CoreError::ShapeMismatch(format!(
                "index length {} vs order {}",
                idx.len(),
                self.order()
            )));
        }
        let mut acc: Array1<T> = {
            let c = &self.cores[0];
            c.slice(s![0, idx[0], ..]).to_owned()
        };
        for (k, core) in self.cores.iter().enumerate().skip(1) {
            let slice = core.slice(s![.., idx[k], ..]);
            acc = slice.t().dot(&acc);
        }
        Ok(acc[0])
    }

    /// Inner product `⟨self, other⟩`.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.mode_sizes() != other.mode_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "mode sizes {:?} vs {:?}",
                self.mode_sizes(),
                other.mode_sizes()
            )));
        }
        let mut m = Array2::<T>::ones((1, 1));
        for (a, b) in self.cores.iter().zip(other.cores.iter()) {
            let i = a.dim().1;
            let mut next = Array2::zeros((a.dim().2, b.dim().2));
            for ii in 0..i {
                let ai = a.slice(s![.., ii, ..]);
                let bi = b.slice(s![.., ii, ..]);
                next = next + ai.t().dot(&m).dot(&bi);
            }
            m = next;
        }
        Ok(m[[0, 0]])
    }

    /// Frobenius norm; exact through the orthogonality pivot when available.
    pub fn norm(&self) -> T {
        match self.orth_pivot {
            Some(p) => self.cores[p].iter().map(|&x| x * x).sum::<T>().sqrt(),
            None => {
                let d = self.dot(self).expect("same shape");
                d.max(T::zero()).sqrt()
            }
        }
    }

    /// Sum of two trains; interior ranks add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.mode_sizes() != other.mode_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "mode sizes {:?} vs {:?}",
                self.mode_sizes(),
                other.mode_sizes()
            )));
        }
        let n = self.order();
        if n == 1 {
            let core = &self.cores[0] + &other.cores[0];
            return Ok(Self::with_pivot(vec![core], None));
        }
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let a = &self.cores[k];
            let b = &other.cores[k];
            let (ra0, i, ra1) = a.dim();
            let (rb0, _, rb1) = b.dim();
            let core = if k == 0 {
                let mut c = Array3::zeros((1, i, ra1 + rb1));
                c.slice_mut(s![.., .., ..ra1]).assign(a);
                c.slice_mut(s![.., .., ra1..]).assign(b);
                c
            } else if k == n - 1 {
                let mut c = Array3::zeros((ra0 + rb0, i, 1));
                c.slice_mut(s![..ra0, .., ..]).assign(a);
                c.slice_mut(s![ra0.., .., ..]).assign(b);
                c
            } else {
                let mut c = Array3::zeros((ra0 + rb0, i, ra1 + rb1));
                c.slice_mut(s![..ra0, .., ..ra1]).assign(a);
                c.slice_mut(s![ra0.., .., ra1..]).assign(b);
                c
            };
            cores.push(core);
        }
        Ok(Self::with_pivot(cores, None))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    /// Scalar multiple; applied to the pivot core so orthogonality survives.
    pub fn scale(&self, a: T) -> Self {
        let mut cores = self.cores.clone();
        let p = self.orth_pivot.unwrap_or(0);
        cores[p].mapv_inplace(|x| x * a);
        Self::with_pivot(cores, self.orth_pivot)
    }

    /// Elementwise (Hadamard) product; interior ranks multiply.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.mode_sizes() != other.mode_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "mode sizes {:?} vs {:?}",
                self.mode_sizes(),
                other.mode_sizes()
            )));
        }
        let mut cores = Vec::with_capacity(self.order());
        for (a, b) in self.cores.iter().zip(other.cores.iter()) {
            let (ra0, i, ra1) = a.dim();
            let (rb0, _, rb1) = b.dim();
            let mut c = Array3::zeros((ra0 * rb0, i, ra1 * rb1));
            for ii in 0..i {
                for a0 in 0..ra0 {
                    for b0 in 0..rb0 {
                        for a1 in 0..ra1 {
                            for b1 in 0..rb1 {
                                c[[a0 * rb0 + b0, ii, a1 * rb1 + b1]] =
                                    a[[a0, ii, a1]] * b[[b0, ii, b1]];
                            }
                        }
                    }
                }
            }
            cores.push(c);
        }
        Ok(Self::with_pivot(cores, None))
    }

    /// Left interface matrix `G^{<n}` of shape `(I₁⋯Iₙ₋₁) × Rₙ₋₁` with rows in
    /// column-major order; `n = 0` yields the `1 × 1` identity.
    pub fn left_interface(&self, n: usize) -> Array2<T> {
        let mut acc = Array2::<T>::ones((1, 1));
        for core in &self.cores[..n] {
            let (_, i, r1) = core.dim();
            let m = acc.nrows();
            let mut next = Array2::zeros((m * i, r1));
            for ii in 0..i {
                let block = acc.dot(&core.slice(s![.., ii, ..]));
                next.slice_mut(s![m * ii..m * (ii + 1), ..]).assign(&block);
            }
            acc = next;
        }
        acc
    }

    /// Right interface matrix `G^{>n}` of shape `Rₙ × (Iₙ₊₁⋯I_N)` with
    /// columns in column-major order; `n = N−1` yields the `1 × 1` identity.
    pub fn right_interface(&self, n: usize) -> Array2<T> {
        let nmodes = self.order();
        // Build the transpose (rows = column-major multi-index) and flip.
        let mut acc_t = Array2::<T>::ones((1, 1));
        for core in self.cores[n + 1..nmodes].iter().rev() {
            let (r0, i, _) = core.dim();
            let m = acc_t.nrows();
            let mut next = Array2::zeros((i * m, r0));
            for ii in 0..i {
                let block = acc_t.dot(&core.slice(s![.., ii, ..]).t());
                // row pair (i, old) with i fastest: rows ii, ii + I, ii + 2I, …
                next.slice_mut(s![ii..; i, ..]).assign(&block);
            }
            acc_t = next;
        }
        acc_t.t().to_owned()
    }

    /// Applies the frame matrix: `X_{≠n} · v`, i.e. the vectorization of the
    /// train with core `n` replaced by `v` (column-major core layout).
    ///
    /// Requires the train to be orthogonalized with pivot `n`.
    pub fn frame_apply(&self, n: usize, v: &Array1<T>) -> Result<Array1<T>> {
        if self.orth_pivot != Some(n) {
            return Err(CoreError::NotOrthogonal {
                expected: n,
                reason: format!("orthogonality pivot is {:?}", self.orth_pivot),
            });
        }
        let (r0, i, r1) = self.cores[n].dim();
        let core = core_from_vec(v, r0, i, r1)?;
        let mut tmp = self.clone();
        tmp.cores[n] = core;
        Ok(Array1::from(tmp.contract_full().to_vec()))
    }

    /// One truncated (preconditioned) gradient step:
    /// `round(self + step · z)` at the given tolerance and rank cap.
    pub fn truncated_gradient_step(
        &self,
        z: &Self,
        step: T,
        tol: T,
        max_rank: usize,
    ) -> Result<Self> {
        if step == T::zero() {
            return self.round(tol, max_rank);
        }
        self.add(&z.scale(step))?.round(tol, max_rank)
    }

    /// Relative reconstruction distance to another train (dense comparison;
    /// intended for small instances and tests).
    pub fn rel_err_dense(&self, other: &Self) -> T {
        self.contract_full().rel_err(&other.contract_full())
    }
}

fn clamp_ranks(mode_sizes: &[usize], interior: &[usize]) -> Vec<usize> {
    let n = mode_sizes.len();
    let mut left = vec![1usize; n + 1];
    let mut right = vec![1usize; n + 1];
    for k in 0..n {
        left[k + 1] = left[k].saturating_mul(mode_sizes[k]).min(1 << 30);
    }
    for k in (0..n).rev() {
        right[k] = right[k + 1].saturating_mul(mode_sizes[k]).min(1 << 30);
    }
    (0..n - 1)
        .map(|k| interior[k].max(1).min(left[k + 1]).min(right[k + 1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn geometric(base: f64, ratio: f64, len: usize) -> Vec<f64> {
        (0..len).map(|k| base * ratio.powi(k as i32)).collect()
    }

    #[test]
    fn geometric_sequence_folds_to_rank_one() {
        // y_k = 2·3^{k-1} over 2^6 samples is an exact rank-1 quantized train.
        let v = geometric(2.0, 3.0, 64);
        let x = DenseTensor::from_vec(&[2, 2, 2, 2, 2, 2], v).unwrap();
        let tt = TTTrain::tt_svd(&x, 1e-12, usize::MAX).unwrap();
        assert!(tt.interior_ranks().iter().all(|&r| r == 1), "{:?}", tt.interior_ranks());
        assert!(tt.contract_full().rel_err(&x) < 1e-12);
    }

    #[test]
    fn zero_tensor_rank_one_zero_cores() {
        let x = DenseTensor::<f64>::zeros(&[2, 2, 2]);
        let tt = TTTrain::tt_svd(&x, 1e-12, usize::MAX).unwrap();
        assert_eq!(tt.interior_ranks(), vec![1, 1]);
        assert!(tt.cores().iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn tt_svd_exact_reconstruction() {
        let x = DenseTensor::<f64>::random_normal(&[4, 4, 4], 3);
        let tt = TTTrain::tt_svd(&x, 0.0, usize::MAX).unwrap();
        assert!(tt.contract_full().rel_err(&x) < 1e-12);
        // pivot-0 form: all cores except the first are right-orthogonal
        for k in 1..tt.order() {
            let m = right_unfold(tt.core(k));
            let g = m.dot(&m.t());
            let eye = Array2::<f64>::eye(g.nrows());
            assert_abs_diff_eq!(g, eye, epsilon = 1e-12);
        }
    }

    #[test]
    fn round_x_plus_x_restores_ranks() {
        let x = DenseTensor::<f64>::random_normal(&[3, 4, 3], 7);
        let tt = TTTrain::tt_svd(&x, 0.0, 2).unwrap();
        assert_eq!(tt.interior_ranks(), vec![2, 2]);
        let sum = tt.add(&tt).unwrap();
        assert_eq!(sum.interior_ranks(), vec![4, 4]);
        let rounded = sum.round(1e-12, usize::MAX).unwrap();
        assert_eq!(rounded.interior_ranks(), vec![2, 2]);
        let two_x = tt.scale(2.0);
        assert!(rounded.rel_err_dense(&two_x) < 1e-12);
    }

    #[test]
    fn round_removes_zero_padding() {
        // Embed a rank-(3,3) train into rank (5,5) with zero blocks.
        let x = DenseTensor::<f64>::random_normal(&[4, 4, 4], 21);
        let tt = TTTrain::tt_svd(&x, 0.0, 3).unwrap();
        let mut padded = Vec::new();
        for (k, c) in tt.cores().iter().enumerate() {
            let (r0, i, r1) = c.dim();
            let p0 = if k == 0 { 1 } else { 5 };
            let p1 = if k == tt.order() - 1 { 1 } else { 5 };
            let mut big = Array3::<f64>::zeros((p0, i, p1));
            big.slice_mut(s![..r0, .., ..r1]).assign(c);
            padded.push(big);
        }
        let padded = TTTrain::new(padded).unwrap();
        assert_eq!(padded.interior_ranks(), vec![5, 5]);
        let rounded = padded.round(1e-12, usize::MAX).unwrap();
        assert_eq!(rounded.interior_ranks(), vec![3, 3]);
        assert!(rounded.rel_err_dense(&tt) < 1e-12);
    }

    #[test]
    fn orthogonalize_preserves_value_and_interfaces() {
        let x = DenseTensor::<f64>::random_normal(&[2, 3, 2], 5);
        let tt = TTTrain::tt_svd(&x, 0.0, usize::MAX).unwrap();
        for pivot in 0..3 {
            let o = tt.orthogonalize(pivot).unwrap();
            assert!(o.rel_err_dense(&tt) < 1e-13);
            let li = o.left_interface(pivot);
            let gram = li.t().dot(&li);
            assert_abs_diff_eq!(gram, Array2::eye(gram.nrows()), epsilon = 1e-13);
            let ri = o.right_interface(pivot);
            let gram = ri.dot(&ri.t());
            assert_abs_diff_eq!(gram, Array2::eye(gram.nrows()), epsilon = 1e-13);
        }
    }

    #[test]
    fn rank_one_unit_train_unchanged_up_to_sign() {
        let e1 = Array1::from(vec![1.0_f64, 0.0]);
        let e2 = Array1::from(vec![0.0_f64, 1.0]);
        let tt = TTTrain::from_rank_one(&[e1, e2]).unwrap();
        let o = tt.orthogonalize(1).unwrap();
        assert!(o.rel_err_dense(&tt) < 1e-14);
        for (a, b) in o.cores().iter().zip(tt.cores().iter()) {
            let same: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum();
            let flip: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x + y).abs()).sum();
            assert!(same < 1e-14 || flip < 1e-14);
        }
    }

    #[test]
    fn degenerate_unit_modes_are_supported() {
        // size-1 modes act as rank-transfer matrices
        let x = DenseTensor::<f64>::random_normal(&[3, 1, 4, 1, 2], 19);
        let tt = TTTrain::tt_svd(&x, 0.0, usize::MAX).unwrap();
        assert!(tt.contract_full().rel_err(&x) < 1e-12);
        let rounded = tt.round(1e-12, usize::MAX).unwrap();
        assert!(rounded.rel_err_dense(&tt) < 1e-12);
    }

    #[test]
    fn dot_is_nonnegative_on_self() {
        let tt = TTTrain::<f64>::random(&[3, 2, 3], &[2, 2], 8).unwrap();
        let d = tt.dot(&tt).unwrap();
        assert!(d >= 0.0);
        let dense = tt.contract_full();
        assert_abs_diff_eq!(d, dense.dot(&dense).unwrap(), epsilon = 1e-10 * d.abs().max(1.0));
    }

    #[test]
    fn add_and_hadamard_rank_arithmetic() {
        let a = TTTrain::<f64>::random(&[3, 3, 3], &[2, 3], 1).unwrap();
        let b = TTTrain::<f64>::random(&[3, 3, 3], &[3, 2], 2).unwrap();
        assert_eq!(a.add(&b).unwrap().interior_ranks(), vec![5, 5]);
        assert_eq!(a.hadamard(&b).unwrap().interior_ranks(), vec![6, 6]);
    }

    #[test]
    fn frame_apply_reproduces_vectorization() {
        let x = DenseTensor::<f64>::random_normal(&[2, 3, 2], 13);
        let tt = TTTrain::tt_svd(&x, 0.0, usize::MAX).unwrap();
        for n in 0..3 {
            let o = tt.orthogonalize(n).unwrap();
            let v = core_to_vec(o.core(n));
            let rebuilt = o.frame_apply(n, &v).unwrap();
            let expected = Array1::from(o.contract_full().to_vec());
            assert_abs_diff_eq!(rebuilt, expected, epsilon = 1e-12);
            // zero core gives the zero vector
            let zero = o.frame_apply(n, &Array1::zeros(v.len())).unwrap();
            assert!(zero.iter().all(|&z| z == 0.0));
        }
    }

    #[test]
    fn frame_apply_requires_orthogonality() {
        let tt = TTTrain::<f64>::random(&[2, 2, 2], &[2, 2], 3).unwrap();
        let v = core_to_vec(tt.core(1));
        assert!(tt.frame_apply(1, &v).is_err());
    }

    #[test]
    fn truncated_gradient_step_basics() {
        let x = TTTrain::<f64>::random(&[2, 2, 2], &[2, 2], 4).unwrap();
        // step = 0 reduces to rounding
        let a = x.truncated_gradient_step(&x, 0.0, 1e-12, usize::MAX).unwrap();
        let b = x.round(1e-12, usize::MAX).unwrap();
        assert!(a.rel_err_dense(&b) < 1e-12);
        // x + (−1)·x = 0
        let e1 = Array1::from(vec![1.0_f64, 2.0]);
        let e2 = Array1::from(vec![0.5_f64, 1.0]);
        let e3 = Array1::from(vec![-1.0_f64, 3.0]);
        let r1 = TTTrain::from_rank_one(&[e1, e2, e3]).unwrap();
        let z = r1.scale(-1.0);
        let stepped = r1.truncated_gradient_step(&z, 1.0, 1e-12, usize::MAX).unwrap();
        assert!(stepped.norm() < 1e-12);
    }
}
