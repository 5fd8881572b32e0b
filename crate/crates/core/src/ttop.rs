//! Matrices in TT/MPO format: fourth-order cores `(Rₙ₋₁, Iₙ, Jₙ, Rₙ)` with a
//! row mode `Iₙ` and a column mode `Jₙ` per site.
//!
//! The represented matrix acts on column-major vectorizations:
//! `A(i, j) = A⁽¹⁾[i₁, j₁] ⋯ A⁽ᴺ⁾[i_N, j_N]` with
//! `i = i₁ + I₁·(i₂ + …)` and likewise for `j`.

use crate::dense::DenseTensor;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::tt::TTTrain;
use ndarray::{s, Array2, Array3, Array4};

#[derive(Clone, Debug)]
pub struct TTOperator<T> {
    cores: Vec<Array4<T>>,
}

impl<T: Scalar> TTOperator<T> {
    pub fn new(cores: Vec<Array4<T>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().3 != 1 {
            return Err(CoreError::ShapeMismatch("boundary ranks must be one".into()));
        }
        for w in cores.windows(2) {
            if w[0].dim().3 != w[1].dim().0 {
                return Err(CoreError::ShapeMismatch(format!(
                    "rank chain broken: {} vs {}",
                    w[0].dim().3,
                    w[1].dim().0
                )));
            }
        }
        Ok(Self { cores })
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn row_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    pub fn col_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().2).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(1);
        r
    }

    pub fn interior_ranks(&self) -> Vec<usize> {
        self.cores[..self.order() - 1].iter().map(|c| c.dim().3).collect()
    }

    pub fn core(&self, n: usize) -> &Array4<T> {
        &self.cores[n]
    }

    pub fn cores(&self) -> &[Array4<T>] {
        &self.cores
    }

    pub fn is_square(&self) -> bool {
        self.row_sizes() == self.col_sizes()
    }

    /// Identity operator for the given (square) mode sizes.
    pub fn identity(mode_sizes: &[usize]) -> Self {
        let cores = mode_sizes
            .iter()
            .map(|&m| {
                let mut c = Array4::zeros((1, m, m, 1));
                for i in 0..m {
                    c[[0, i, i, 0]] = T::one();
                }
                c
            })
            .collect();
        Self { cores }
    }

    /// Diagonal operator whose diagonal is the given train.
    pub fn diag(train: &TTTrain<T>) -> Self {
        let cores = train
            .cores()
            .iter()
            .map(|c| {
                let (r0, i, r1) = c.dim();
                let mut out = Array4::zeros((r0, i, i, r1));
                for a in 0..r0 {
                    for ii in 0..i {
                        for b in 0..r1 {
                            out[[a, ii, ii, b]] = c[[a, ii, b]];
                        }
                    }
                }
                out
            })
            .collect();
        Self { cores }
    }

    /// Merges row and column modes into one mode of size `Iₙ·Jₙ` (pair index
    /// `iₙ + Iₙ·jₙ`), exposing the operator as a plain train.
    pub fn to_merged_train(&self) -> TTTrain<T> {
        let cores = self
            .cores
            .iter()
            .map(|c| {
                let (r0, i, j, r1) = c.dim();
                let mut out = Array3::zeros((r0, i * j, r1));
                for a in 0..r0 {
                    for ii in 0..i {
                        for jj in 0..j {
                            for b in 0..r1 {
                                out[[a, ii + i * jj, b]] = c[[a, ii, jj, b]];
                            }
                        }
                    }
                }
                out
            })
            .collect();
        TTTrain::new(cores).expect("valid chain")
    }

    /// Inverse of [`TTOperator::to_merged_train`].
    pub fn from_merged_train(
        train: &TTTrain<T>,
        row_sizes: &[usize],
        col_sizes: &[usize],
    ) -> Result<Self> {
        if train.order() != row_sizes.len() || row_sizes.len() != col_sizes.len() {
            return Err(CoreError::ShapeMismatch("mode count mismatch".into()));
        }
        let mut cores = Vec::with_capacity(train.order());
        for (k, c) in train.cores().iter().enumerate() {
            let (r0, m, r1) = c.dim();
            let (i, j) = (row_sizes[k], col_sizes[k]);
            if m != i * j {
                return Err(CoreError::ShapeMismatch(format!(
                    "merged mode {m} is not {i}·{j}"
                )));
            }
            let mut out = Array4::zeros((r0, i, j, r1));
            for a in 0..r0 {
                for ii in 0..i {
                    for jj in 0..j {
                        for b in 0..r1 {
                            out[[a, ii, jj, b]] = c[[a, ii + i * jj, b]];
                        }
                    }
                }
            }
            cores.push(out);
        }
        Self::new(cores)
    }

    /// TT-SVD of a dense matrix given the per-mode row/column sizes.
    pub fn from_dense_matrix(
        matrix: &Array2<T>,
        row_sizes: &[usize],
        col_sizes: &[usize],
        tol: T,
        max_rank: usize,
    ) -> Result<Self> {
        let ni: usize = row_sizes.iter().product();
        let nj: usize = col_sizes.iter().product();
        if matrix.dim() != (ni, nj) {
            return Err(CoreError::ShapeMismatch(format!(
                "matrix {:?} vs mode sizes {:?} × {:?}",
                matrix.dim(),
                row_sizes,
                col_sizes
            )));
        }
        let n = row_sizes.len();
        let merged_sizes: Vec<usize> = row_sizes
            .iter()
            .zip(col_sizes.iter())
            .map(|(&i, &j)| i * j)
            .collect();
        let total: usize = merged_sizes.iter().product();
        let mut values = vec![T::zero(); total];
        // Column-major multi-index over pairs kₙ = iₙ + Iₙ·jₙ.
        let mut idx = vec![0usize; n];
        for (flat, value) in values.iter_mut().enumerate() {
            let mut rem = flat;
            for (k, &m) in merged_sizes.iter().enumerate() {
                idx[k] = rem % m;
                rem /= m;
            }
            let mut i = 0usize;
            let mut j = 0usize;
            let mut si = 1usize;
            let mut sj = 1usize;
            for k in 0..n {
                let ii = idx[k] % row_sizes[k];
                let jj = idx[k] / row_sizes[k];
                i += ii * si;
                j += jj * sj;
                si *= row_sizes[k];
                sj *= col_sizes[k];
            }
            *value = matrix[[i, j]];
        }
        let dense = DenseTensor::from_vec(&merged_sizes, values)?;
        let train = TTTrain::tt_svd(&dense, tol, max_rank)?;
        Self::from_merged_train(&train, row_sizes, col_sizes)
    }

    /// Dense matrix reconstruction (for oracles and small instances).
    pub fn to_dense_matrix(&self) -> Array2<T> {
        let train = self.to_merged_train();
        let dense = train.contract_full();
        let v = dense.to_vec();
        let row_sizes = self.row_sizes();
        let col_sizes = self.col_sizes();
        let ni: usize = row_sizes.iter().product();
        let nj: usize = col_sizes.iter().product();
        let merged = dense.mode_sizes().to_vec();
        let n = merged.len();
        let mut out = Array2::zeros((ni, nj));
        let mut idx = vec![0usize; n];
        for (flat, &value) in v.iter().enumerate() {
            let mut rem = flat;
            for (k, &m) in merged.iter().enumerate() {
                idx[k] = rem % m;
                rem /= m;
            }
            let mut i = 0usize;
            let mut j = 0usize;
            let mut si = 1usize;
            let mut sj = 1usize;
            for k in 0..n {
                i += (idx[k] % row_sizes[k]) * si;
                j += (idx[k] / row_sizes[k]) * sj;
                si *= row_sizes[k];
                sj *= col_sizes[k];
            }
            out[[i, j]] = value;
        }
        out
    }

    /// Matrix-vector product in TT format; ranks multiply elementwise.
    pub fn apply(&self, x: &TTTrain<T>) -> Result<TTTrain<T>> {
        if self.col_sizes() != x.mode_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "operator column sizes {:?} vs train modes {:?}",
                self.col_sizes(),
                x.mode_sizes()
            )));
        }
        let mut cores = Vec::with_capacity(self.order());
        for (a, xc) in self.cores.iter().zip(x.cores().iter()) {
            let (ra0, i, j, ra1) = a.dim();
            let (rx0, _, rx1) = xc.dim();
            let mut out = Array3::zeros((ra0 * rx0, i, ra1 * rx1));
            for ii in 0..i {
                // out[(α,a), ii, (β,b)] = Σ_j A[α, ii, j, β] · x[a, j, b]
                for alpha in 0..ra0 {
                    for beta in 0..ra1 {
                        for av in 0..rx0 {
                            for bv in 0..rx1 {
                                let mut acc = T::zero();
                                for jj in 0..j {
                                    acc = acc + a[[alpha, ii, jj, beta]] * xc[[av, jj, bv]];
                                }
                                out[[alpha * rx0 + av, ii, beta * rx1 + bv]] = acc;
                            }
                        }
                    }
                }
            }
            cores.push(out);
        }
        TTTrain::new(cores)
    }

    /// Transposed operator (row and column modes swapped).
    pub fn transpose(&self) -> Self {
        let cores = self
            .cores
            .iter()
            .map(|c| {
                c.view()
                    .permuted_axes([0, 2, 1, 3])
                    .as_standard_layout()
                    .to_owned()
            })
            .collect();
        Self { cores }
    }

    /// Operator product `self · other`; ranks multiply elementwise.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.col_sizes() != other.row_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "compose: column sizes {:?} vs row sizes {:?}",
                self.col_sizes(),
                other.row_sizes()
            )));
        }
        let mut cores = Vec::with_capacity(self.order());
        for (a, b) in self.cores.iter().zip(other.cores.iter()) {
            let (ra0, i, k, ra1) = a.dim();
            let (rb0, _, j, rb1) = b.dim();
            let mut out = Array4::zeros((ra0 * rb0, i, j, ra1 * rb1));
            for ii in 0..i {
                for jj in 0..j {
                    for a0 in 0..ra0 {
                        for b0 in 0..rb0 {
                            for a1 in 0..ra1 {
                                for b1 in 0..rb1 {
                                    let mut acc = T::zero();
                                    for kk in 0..k {
                                        acc = acc
                                            + a[[a0, ii, kk, a1]] * b[[b0, kk, jj, b1]];
                                    }
                                    out[[a0 * rb0 + b0, ii, jj, a1 * rb1 + b1]] = acc;
                                }
                            }
                        }
                    }
                }
            }
            cores.push(out);
        }
        Self::new(cores)
    }

    /// Operator sum; interior ranks add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.row_sizes() != other.row_sizes() || self.col_sizes() != other.col_sizes() {
            return Err(CoreError::ShapeMismatch("operator mode sizes differ".into()));
        }
        let n = self.order();
        if n == 1 {
            let core = &self.cores[0] + &other.cores[0];
            return Ok(Self { cores: vec![core] });
        }
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let a = &self.cores[k];
            let b = &other.cores[k];
            let (ra0, i, j, ra1) = a.dim();
            let (rb0, _, _, rb1) = b.dim();
            let core = if k == 0 {
                let mut c = Array4::zeros((1, i, j, ra1 + rb1));
                c.slice_mut(s![.., .., .., ..ra1]).assign(a);
                c.slice_mut(s![.., .., .., ra1..]).assign(b);
                c
            } else if k == n - 1 {
                let mut c = Array4::zeros((ra0 + rb0, i, j, 1));
                c.slice_mut(s![..ra0, .., .., ..]).assign(a);
                c.slice_mut(s![ra0.., .., .., ..]).assign(b);
                c
            } else {
                let mut c = Array4::zeros((ra0 + rb0, i, j, ra1 + rb1));
                c.slice_mut(s![..ra0, .., .., ..ra1]).assign(a);
                c.slice_mut(s![ra0.., .., .., ra1..]).assign(b);
                c
            };
            cores.push(core);
        }
        Ok(Self { cores })
    }

    pub fn scale(&self, a: T) -> Self {
        let mut cores = self.cores.clone();
        cores[0].mapv_inplace(|x| x * a);
        Self { cores }
    }

    /// MPO rounding through the merged-mode train.
    pub fn round(&self, tol: T, max_rank: usize) -> Result<Self> {
        let rounded = self.to_merged_train().round(tol, max_rank)?;
        Self::from_merged_train(&rounded, &self.row_sizes(), &self.col_sizes())
    }
}
