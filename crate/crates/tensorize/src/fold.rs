//! Folding (reshaping) between vectors and tensors.
//!
//! The linear index bijection is column-major: entry `(i₁, …, i_N)` of the
//! folded tensor is element `i₁ + I₁·(i₂ + I₂·(…))` of the vector, so the
//! first mode runs fastest and `unfold ∘ fold` is the identity.

use crate::error::{Result, TensorizeError};
use ttkit_core::{DenseTensor, Scalar};

/// Folds a vector into a tensor with the given mode sizes.
pub fn fold<T: Scalar>(values: &[T], mode_sizes: &[usize]) -> Result<DenseTensor<T>> {
    let total: usize = mode_sizes.iter().product();
    if total != values.len() {
        return Err(TensorizeError::SizeMismatch(format!(
            "vector length {} does not factor as {:?}",
            values.len(),
            mode_sizes
        )));
    }
    Ok(DenseTensor::from_vec(mode_sizes, values.to_vec())?)
}

/// Vectorizes a tensor (inverse of [`fold`]).
pub fn unfold<T: Scalar>(x: &DenseTensor<T>) -> Vec<T> {
    x.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttkit_core::TTTrain;

    #[test]
    fn fold_two_by_three_is_column_major() {
        let v: Vec<f64> = (1..=6).map(|x| x as f64).collect();
        let m = fold(&v, &[2, 3]).unwrap();
        // columns [1,2], [3,4], [5,6]
        assert_eq!(m.get(&[0, 0]), 1.0);
        assert_eq!(m.get(&[0, 1]), 3.0);
        assert_eq!(m.get(&[0, 2]), 5.0);
        assert_eq!(m.get(&[1, 0]), 2.0);
        assert_eq!(m.get(&[1, 1]), 4.0);
        assert_eq!(m.get(&[1, 2]), 6.0);
    }

    #[test]
    fn unfold_fold_identity() {
        let v: Vec<f64> = (0..30).map(|x| (x as f64).sin()).collect();
        let t = fold(&v, &[5, 3, 2]).unwrap();
        assert_eq!(unfold(&t), v);
    }

    #[test]
    fn exponential_folds_to_rank_one() {
        // a·z^{k−1} over 2^8 samples folded to 8 modes is exactly rank 1.
        let a = 0.7;
        let z = 1.013_f64;
        let v: Vec<f64> = (0..256).map(|k| a * z.powi(k)).collect();
        let t = fold(&v, &[2; 8]).unwrap();
        let tt = TTTrain::tt_svd(&t, 1e-12, usize::MAX).unwrap();
        assert!(tt.interior_ranks().iter().all(|&r| r == 1), "{:?}", tt.interior_ranks());
    }
}
