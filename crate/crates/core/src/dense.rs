//! Dense `N`-way tensors, used as inputs to TT-SVD and as the brute-force
//! oracle representation in tests.
//!
//! Storage is a standard (row-major) ndarray, while *vectorization* follows
//! the column-major linear index `i = i₁ + I₁·(i₂ + I₂·(i₃ + … ))` with the
//! first mode running fastest, matching the slice-product convention of the
//! TT format. [`DenseTensor::from_vec`] and [`DenseTensor::to_vec`] convert
//! between the two.

use crate::error::{CoreError, Result};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use ndarray::{Array1, Array2, ArrayD, ArrayViewD, IxDyn};

/// Dense tensor with explicit mode sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    data: ArrayD<T>,
}

impl<T: Scalar> DenseTensor<T> {
    /// Wraps an ndarray, normalizing to standard layout.
    pub fn from_array(data: ArrayD<T>) -> Result<Self> {
        if data.is_empty() {
            return Err(CoreError::EmptyTensor);
        }
        Ok(Self { data: data.as_standard_layout().to_owned() })
    }

    pub fn zeros(mode_sizes: &[usize]) -> Self {
        Self { data: ArrayD::zeros(IxDyn(mode_sizes)) }
    }

    /// Builds a tensor from its column-major vectorization.
    pub fn from_vec(mode_sizes: &[usize], values: Vec<T>) -> Result<Self> {
        let total: usize = mode_sizes.iter().product();
        if mode_sizes.is_empty() || total == 0 {
            return Err(CoreError::EmptyTensor);
        }
        if values.len() != total {
            return Err(CoreError::ShapeMismatch(format!(
                "value count {} does not match mode sizes {:?}",
                values.len(),
                mode_sizes
            )));
        }
        let rev: Vec<usize> = mode_sizes.iter().rev().copied().collect();
        let arr = ArrayD::from_shape_vec(IxDyn(&rev), values)
            .map_err(|e| CoreError::ShapeMismatch(e.to_string()))?;
        let n = mode_sizes.len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let arr = arr.permuted_axes(IxDyn(&perm));
        Ok(Self { data: arr.as_standard_layout().to_owned() })
    }

    /// Column-major vectorization (first index fastest).
    pub fn to_vec(&self) -> Vec<T> {
        let n = self.order();
        let perm: Vec<usize> = (0..n).rev().collect();
        self.data.view().permuted_axes(IxDyn(&perm)).iter().copied().collect()
    }

    pub fn random_normal(mode_sizes: &[usize], seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let total: usize = mode_sizes.iter().product();
        let values: Vec<T> = (0..total).map(|_| rng.normal()).collect();
        Self::from_vec(mode_sizes, values).expect("consistent shape")
    }

    pub fn order(&self) -> usize {
        self.data.ndim()
    }

    pub fn mode_sizes(&self) -> &[usize] {
        self.data.shape()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn view(&self) -> ArrayViewD<'_, T> {
        self.data.view()
    }

    pub fn into_array(self) -> ArrayD<T> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[IxDyn(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: T) {
        self.data[IxDyn(idx)] = value;
    }

    pub fn fro_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// Relative Frobenius distance `‖self − other‖ / ‖other‖` (absolute when
    /// `other` is zero).
    pub fn rel_err(&self, other: &Self) -> T {
        let denom = other.fro_norm();
        let mut diff = T::zero();
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = *a - *b;
            diff = diff + d * d;
        }
        let diff = diff.sqrt();
        if denom > T::zero() {
            diff / denom
        } else {
            diff
        }
    }

    pub fn scale(&self, a: T) -> Self {
        Self { data: self.data.mapv(|x| x * a) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { data: &self.data - &other.data })
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { data: &self.data * &other.data })
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| a * b)
            .sum())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.mode_sizes() != other.mode_sizes() {
            return Err(CoreError::ShapeMismatch(format!(
                "mode sizes {:?} vs {:?}",
                self.mode_sizes(),
                other.mode_sizes()
            )));
        }
        Ok(())
    }

    /// Split unfolding: rows enumerate the first `k` modes (column-major),
    /// columns the remaining modes (column-major).
    pub fn unfolding_split(&self, k: usize) -> Array2<T> {
        let sizes = self.mode_sizes();
        let rows: usize = sizes[..k].iter().product();
        let cols: usize = sizes[k..].iter().product();
        let v = self.to_vec();
        // The column-major vector laid out as (rows, cols) in column-major
        // order is exactly this unfolding.
        let mut out = Array2::zeros((rows, cols));
        for c in 0..cols {
            for r in 0..rows {
                out[[r, c]] = v[r + rows * c];
            }
        }
        out
    }

    /// Mode-`n` unfolding `X₍ₙ₎` of shape `Iₙ × Πₖ≠ₙ Iₖ`, columns ordered
    /// column-major over the remaining modes in their original order.
    pub fn mode_unfolding(&self, n: usize) -> Array2<T> {
        let sizes = self.mode_sizes().to_vec();
        let i_n = sizes[n];
        let rest: usize = self.len() / i_n;
        let mut out = Array2::zeros((i_n, rest));
        let mut idx = vec![0usize; sizes.len()];
        for (flat, &v) in self.to_vec().iter().enumerate() {
            // decode column-major flat index
            let mut rem = flat;
            for (k, &s) in sizes.iter().enumerate() {
                idx[k] = rem % s;
                rem /= s;
            }
            let mut col = 0usize;
            let mut stride = 1usize;
            for (k, &s) in sizes.iter().enumerate() {
                if k != n {
                    col += idx[k] * stride;
                    stride *= s;
                }
            }
            out[[idx[n], col]] = v;
        }
        out
    }

    /// Mode-`n` matrix product `X ×ₙ U` where `U` is `J × Iₙ`.
    pub fn mode_product(&self, u: &Array2<T>, n: usize) -> Result<Self> {
        let sizes = self.mode_sizes().to_vec();
        if u.ncols() != sizes[n] {
            return Err(CoreError::ShapeMismatch(format!(
                "mode-{} product: matrix has {} columns, mode size is {}",
                n,
                u.ncols(),
                sizes[n]
            )));
        }
        let unf = self.mode_unfolding(n);
        let prod = u.dot(&unf);
        let mut new_sizes = sizes;
        new_sizes[n] = u.nrows();
        // Rebuild from the mode-n unfolding.
        let mut out = DenseTensor::zeros(&new_sizes);
        let mut idx = vec![0usize; new_sizes.len()];
        let total: usize = new_sizes.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            for (k, &s) in new_sizes.iter().enumerate() {
                idx[k] = rem % s;
                rem /= s;
            }
            let mut col = 0usize;
            let mut stride = 1usize;
            for (k, &s) in new_sizes.iter().enumerate() {
                if k != n {
                    col += idx[k] * stride;
                    stride *= s;
                }
            }
            out.set(&idx, prod[[idx[n], col]]);
        }
        Ok(out)
    }

    /// Contracted mode-`n` vector product `X ×̄ₙ v`, dropping the mode.
    pub fn vec_product(&self, v: &Array1<T>, n: usize) -> Result<Self> {
        let sizes = self.mode_sizes().to_vec();
        if v.len() != sizes[n] {
            return Err(CoreError::ShapeMismatch(format!(
                "mode-{} contraction: vector length {} vs mode size {}",
                n,
                v.len(),
                sizes[n]
            )));
        }
        if sizes.len() == 1 {
            let s: T = (0..sizes[0]).map(|i| self.data[IxDyn(&[i])] * v[i]).sum();
            return DenseTensor::from_vec(&[1], vec![s]);
        }
        let new_sizes: Vec<usize> = sizes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != n)
            .map(|(_, &s)| s)
            .collect();
        let unf = self.mode_unfolding(n);
        let row = v.dot(&unf);
        DenseTensor::from_vec(&new_sizes, row.to_vec())
    }

    /// Outer product with another tensor (modes concatenated).
    pub fn outer(&self, other: &Self) -> Self {
        let mut sizes = self.mode_sizes().to_vec();
        sizes.extend_from_slice(other.mode_sizes());
        let a = self.to_vec();
        let b = other.to_vec();
        let mut v = Vec::with_capacity(a.len() * b.len());
        for &bv in &b {
            for &av in &a {
                v.push(av * bv);
            }
        }
        DenseTensor::from_vec(&sizes, v).expect("consistent shape")
    }

    /// Symmetrization `S(X) = (1/N!) Σ_π π(X)` over all mode permutations.
    /// All mode sizes must be equal.
    pub fn symmetrize(&self) -> Result<Self> {
        let sizes = self.mode_sizes().to_vec();
        let n = sizes.len();
        if sizes.iter().any(|&s| s != sizes[0]) {
            return Err(CoreError::InvalidArgument(
                "symmetrization requires equal mode sizes".into(),
            ));
        }
        let perms = permutations(n);
        let scale = T::from_f64_c(1.0 / perms.len() as f64);
        let mut out = DenseTensor::zeros(&sizes);
        let mut idx = vec![0usize; n];
        let mut pidx = vec![0usize; n];
        let total = self.len();
        for flat in 0..total {
            let mut rem = flat;
            for (k, &s) in sizes.iter().enumerate() {
                idx[k] = rem % s;
                rem /= s;
            }
            let mut acc = T::zero();
            for p in &perms {
                for k in 0..n {
                    pidx[k] = idx[p[k]];
                }
                acc = acc + self.get(&pidx);
            }
            out.set(&idx, acc * scale);
        }
        Ok(out)
    }

    /// Largest deviation from full symmetry, `max |X − π(X)|` over all mode
    /// permutations.
    pub fn symmetry_deviation(&self) -> T {
        let sym = match self.symmetrize() {
            Ok(s) => s,
            Err(_) => return T::infinity(),
        };
        self.data
            .iter()
            .zip(sym.data.iter())
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m })
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fold_matches_column_major_example() {
        // [1..6] folded to 2×3 gives columns [1,2], [3,4], [5,6].
        let v: Vec<f64> = (1..=6).map(|x| x as f64).collect();
        let t = DenseTensor::from_vec(&[2, 3], v).unwrap();
        assert_eq!(t.get(&[0, 0]), 1.0);
        assert_eq!(t.get(&[1, 0]), 2.0);
        assert_eq!(t.get(&[0, 1]), 3.0);
        assert_eq!(t.get(&[1, 2]), 6.0);
    }

    #[test]
    fn vec_roundtrip() {
        let t = DenseTensor::<f64>::random_normal(&[3, 4, 2], 11);
        let v = t.to_vec();
        let t2 = DenseTensor::from_vec(t.mode_sizes(), v).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn unfolding_split_is_column_major() {
        let v: Vec<f64> = (0..24).map(|x| x as f64).collect();
        let t = DenseTensor::from_vec(&[2, 3, 4], v).unwrap();
        let m = t.unfolding_split(1); // 2 × 12
        assert_eq!(m[[0, 0]], 0.0);
        assert_eq!(m[[1, 0]], 1.0);
        assert_eq!(m[[0, 1]], 2.0);
        let m2 = t.unfolding_split(2); // 6 × 4
        assert_eq!(m2[[5, 3]], 23.0);
    }

    #[test]
    fn mode_product_against_loops() {
        let t = DenseTensor::<f64>::random_normal(&[3, 4, 2], 5);
        let u = ndarray::array![[1.0_f64, 2.0, 0.0, -1.0], [0.5, 0.0, 1.0, 1.0]];
        let p = t.mode_product(&u, 1).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut acc = 0.0;
                    for l in 0..4 {
                        acc += u[[j, l]] * t.get(&[i, l, k]);
                    }
                    assert_abs_diff_eq!(p.get(&[i, j, k]), acc, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn symmetrize_fixed_point() {
        let t = DenseTensor::<f64>::random_normal(&[3, 3, 3], 9);
        let s = t.symmetrize().unwrap();
        assert!(s.symmetry_deviation() < 1e-12);
    }
}
