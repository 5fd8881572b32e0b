//! Toeplitz and Hankel tensors and the Löwner matrix.

use crate::error::{Result, TensorizeError};
use ndarray::{Array1, Array2};
use ttkit_core::{DenseTensor, Scalar};

fn check_generator_length(len: usize, mode_sizes: &[usize]) -> Result<()> {
    if mode_sizes.is_empty() {
        return Err(TensorizeError::InvalidArgument("no mode sizes".into()));
    }
    let expected: usize = mode_sizes.iter().sum::<usize>() + 1 - mode_sizes.len();
    if expected != len {
        return Err(TensorizeError::SizeMismatch(format!(
            "generator length {len} but mode sizes {mode_sizes:?} require {expected}"
        )));
    }
    Ok(())
}

/// `N`th-order Toeplitz tensor of a generating vector:
/// `T(i₁, …, i_N) = y(ī₁ + … + ī_{N−1} + i_N)` with `īₙ = Iₙ − iₙ`
/// (one-based), so the generator length must be `Σ Iₙ − N + 1`.
pub fn toeplitz_tensor<T: Scalar>(y: &[T], mode_sizes: &[usize]) -> Result<DenseTensor<T>> {
    check_generator_length(y.len(), mode_sizes)?;
    let n = mode_sizes.len();
    let mut out = DenseTensor::zeros(mode_sizes);
    let total: usize = mode_sizes.iter().product();
    let mut idx = vec![0usize; n];
    for flat in 0..total {
        let mut rem = flat;
        for (k, &s) in mode_sizes.iter().enumerate() {
            idx[k] = rem % s;
            rem /= s;
        }
        // zero-based: Σ_{k<N−1} (Iₖ − 1 − iₖ) + i_N indexes the generator
        let mut pos = idx[n - 1];
        for k in 0..n - 1 {
            pos += mode_sizes[k] - 1 - idx[k];
        }
        out.set(&idx, y[pos]);
    }
    Ok(out)
}

/// `N`th-order Hankel tensor: `H(i₁, …, i_N) = y(i₁ + … + i_N − N + 1)`
/// (one-based); generator length `Σ Iₙ − N + 1`.
pub fn hankel_tensor<T: Scalar>(y: &[T], mode_sizes: &[usize]) -> Result<DenseTensor<T>> {
    check_generator_length(y.len(), mode_sizes)?;
    let n = mode_sizes.len();
    let mut out = DenseTensor::zeros(mode_sizes);
    let total: usize = mode_sizes.iter().product();
    let mut idx = vec![0usize; n];
    for flat in 0..total {
        let mut rem = flat;
        for (k, &s) in mode_sizes.iter().enumerate() {
            idx[k] = rem % s;
            rem /= s;
        }
        let pos: usize = idx.iter().sum();
        out.set(&idx, y[pos]);
    }
    Ok(out)
}

/// Recovers the generating vector of a Hankel tensor by concatenating the
/// boundary fibers.
pub fn hankel_generator<T: Scalar>(h: &DenseTensor<T>) -> Vec<T> {
    let sizes = h.mode_sizes().to_vec();
    let n = sizes.len();
    let len: usize = sizes.iter().sum::<usize>() + 1 - n;
    let mut out = Vec::with_capacity(len);
    let mut idx = vec![0usize; n];
    // Walk fibers: modes 1..n−1 pinned at their maxima once passed.
    for mode in 0..n {
        let upper = if mode == n - 1 { sizes[mode] } else { sizes[mode] - 1 };
        for i in 0..upper {
            idx[mode] = i;
            out.push(h.get(&idx));
        }
        idx[mode] = sizes[mode] - 1;
    }
    out
}

/// Recovers the generating vector of a Toeplitz tensor.
///
/// With the convention above, `y(k)` sits at entries with
/// `Σ īₙ + i_N = k`; walking the last mode with the leading modes pinned at
/// their maxima, then the leading modes backwards, reads off the generator.
pub fn toeplitz_generator<T: Scalar>(t: &DenseTensor<T>) -> Vec<T> {
    let sizes = t.mode_sizes().to_vec();
    let n = sizes.len();
    let len: usize = sizes.iter().sum::<usize>() + 1 - n;
    let mut out = Vec::with_capacity(len);
    // start with all leading modes at Iₙ (ī = 0): entries y(i_N)
    let mut idx: Vec<usize> = sizes.iter().map(|&s| s - 1).collect();
    for i in 0..sizes[n - 1] {
        idx[n - 1] = i;
        out.push(t.get(&idx));
    }
    // then decrease the leading modes one step at a time with i_N = I_N
    idx[n - 1] = sizes[n - 1] - 1;
    for mode in (0..n - 1).rev() {
        for step in 1..sizes[mode] {
            idx[mode] = sizes[mode] - 1 - step;
            out.push(t.get(&idx));
        }
        idx[mode] = 0;
    }
    out
}

/// Löwner matrix `L(i, j) = (f(xᵢ) − f(yⱼ)) / (xᵢ − yⱼ)`.
pub fn loewner_matrix<T: Scalar>(
    f_x: &Array1<T>,
    f_y: &Array1<T>,
    x: &Array1<T>,
    y: &Array1<T>,
) -> Result<Array2<T>> {
    if f_x.len() != x.len() || f_y.len() != y.len() {
        return Err(TensorizeError::SizeMismatch(
            "sample vectors and point vectors disagree in length".into(),
        ));
    }
    for &xi in x.iter() {
        for &yj in y.iter() {
            if xi == yj {
                return Err(TensorizeError::InvalidArgument(
                    "point sets must be pairwise distinct".into(),
                ));
            }
        }
    }
    let mut out = Array2::zeros((x.len(), y.len()));
    for i in 0..x.len() {
        for j in 0..y.len() {
            out[[i, j]] = (f_x[i] - f_y[j]) / (x[i] - y[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use ttkit_core::linalg;

    fn seq(n: usize) -> Vec<f64> {
        (1..=n).map(|x| x as f64).collect()
    }

    #[test]
    fn toeplitz_printed_slices() {
        let t = toeplitz_tensor(&seq(7), &[3, 3, 3]).unwrap();
        // horizontal slices T(i₁, :, :)
        let expect = [
            [[5., 6., 7.], [4., 5., 6.], [3., 4., 5.]],
            [[4., 5., 6.], [3., 4., 5.], [2., 3., 4.]],
            [[3., 4., 5.], [2., 3., 4.], [1., 2., 3.]],
        ];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(t.get(&[i, j, k]), expect[i][j][k], "at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn toeplitz_matrix_first_column_and_row() {
        // N = 2 reduces to the classic Toeplitz matrix: first column
        // y(I..1)ᵀ read upwards, first row y(I..L).
        let y = seq(5);
        let t = toeplitz_tensor(&y, &[3, 3]).unwrap();
        for i in 0..3 {
            assert_eq!(t.get(&[i, 0]), y[2 - i]);
        }
        for j in 0..3 {
            assert_eq!(t.get(&[0, j]), y[2 + j]);
        }
    }

    #[test]
    fn hankel_printed_slices() {
        let h = hankel_tensor(&seq(7), &[3, 3, 3]).unwrap();
        let expect = [
            [[1., 2., 3.], [2., 3., 4.], [3., 4., 5.]],
            [[2., 3., 4.], [3., 4., 5.], [4., 5., 6.]],
            [[3., 4., 5.], [4., 5., 6.], [5., 6., 7.]],
        ];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(h.get(&[i, j, k]), expect[i][j][k], "at ({i},{j},{k})");
                }
            }
        }
        assert!(h.symmetry_deviation() < 1e-15);
    }

    #[test]
    fn generators_recovered_from_fibers() {
        let y: Vec<f64> = (0..9).map(|k| ((k * k) as f64).sin()).collect();
        let h = hankel_tensor(&y, &[3, 4, 4]).unwrap();
        assert_eq!(hankel_generator(&h), y);
        let t = toeplitz_tensor(&y, &[3, 4, 4]).unwrap();
        assert_eq!(toeplitz_generator(&t), y);
    }

    #[test]
    fn loewner_of_reciprocal_is_rank_one() {
        let x = array![3.0_f64, 4.0, 5.0, 6.0];
        let y = array![8.0_f64, 9.0, 10.0];
        let fx = x.mapv(|t| 1.0 / t);
        let fy = y.mapv(|t| 1.0 / t);
        let l = loewner_matrix(&fx, &fy, &x, &y).unwrap();
        // closed form: −[1/3,1/4,1/5,1/6]ᵀ · [1/8,1/9,1/10]
        for i in 0..4 {
            for j in 0..3 {
                let want = -fx[i] * fy[j];
                assert!((l[[i, j]] - want).abs() < 1e-14);
            }
        }
        let (_, s, _) = linalg::svd(&l.view()).unwrap();
        assert!(s[1] < 1e-14 * s[0]);
    }

    #[test]
    fn loewner_constant_is_zero_and_rational_rank_two() {
        let x = array![0.5_f64, 1.5, 2.5, 3.5];
        let y = array![5.0_f64, 6.0, 7.0];
        let c = Array1::from_elem(4, 2.0);
        let cy = Array1::from_elem(3, 2.0);
        let l = loewner_matrix(&c, &cy, &x, &y).unwrap();
        assert!(l.iter().all(|v| v.abs() < 1e-15));

        // degree-(1,1) rational f(t) = (2t+1)/(t+3): Löwner rank ≤ 2
        let f = |t: f64| (2.0 * t + 1.0) / (t + 3.0);
        let fx = x.mapv(f);
        let fy = y.mapv(f);
        let l = loewner_matrix(&fx, &fy, &x, &y).unwrap();
        let (_, s, _) = linalg::svd(&l.view()).unwrap();
        assert!(s[2] < 1e-12 * s[0], "sigma: {s:?}");
    }

    #[test]
    fn rejects_coinciding_points() {
        let x = array![1.0_f64, 2.0];
        let y = array![2.0_f64, 3.0];
        let fx = x.clone();
        let fy = y.clone();
        assert!(loewner_matrix(&fx, &fy, &x, &y).is_err());
    }

    #[test]
    fn rejects_bad_generator_length() {
        assert!(toeplitz_tensor(&seq(6), &[3, 3, 3]).is_err());
        assert!(hankel_tensor(&seq(8), &[3, 3, 3]).is_err());
    }
}
