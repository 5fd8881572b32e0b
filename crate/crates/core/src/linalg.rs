//! Thin wrappers around the dense factorizations used by the TT routines.
//!
//! All truncation decisions live here so every caller applies the same rule:
//! given singular values `σ₁ ≥ σ₂ ≥ …`, keep the smallest rank `r` whose
//! trailing energy satisfies `Σ_{k>r} σ_k² ≤ tol² · Σ_k σ_k²`, then clamp to
//! `[1, max_rank]`.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use linfa_linalg::cholesky::SolveC;
use linfa_linalg::eigh::{EigSort, Eigh};
use linfa_linalg::qr::QR;
use linfa_linalg::Order;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};

/// Relative threshold below which a triangular factor is treated as
/// rank-deficient and the QR path falls back to an SVD factorization.
pub const RANK_DEFICIENCY_RTOL: f64 = 1e-13;

/// Full (compact) SVD with singular values sorted descending.
///
/// Computed by one-sided Jacobi rotations, which retain high relative
/// accuracy even for strongly graded matrices (column norms spanning many
/// orders of magnitude), a situation TT-SVD runs into routinely.
pub fn svd<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array2<T>, Array1<T>, Array2<T>)> {
    if m.is_empty() {
        return Err(CoreError::InvalidArgument("svd of empty matrix".into()));
    }
    if m.nrows() >= m.ncols() {
        jacobi_svd_tall(m)
    } else {
        let mt = m.t().as_standard_layout().to_owned();
        let (u, s, vt) = jacobi_svd_tall(&mt.view())?;
        Ok((vt.t().as_standard_layout().to_owned(), s, u.t().as_standard_layout().to_owned()))
    }
}

/// One-sided Jacobi SVD of a tall (rows ≥ cols) matrix.
fn jacobi_svd_tall<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array2<T>, Array1<T>, Array2<T>)> {
    let (rows, cols) = m.dim();
    let mut b = m.as_standard_layout().to_owned();
    let mut v: Array2<T> = Array2::eye(cols);
    let eps = T::epsilon();
    let conv_tol = eps * T::from_f64_c(cols.max(2) as f64).sqrt();
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off_diagonal = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = T::zero();
                for r in 0..rows {
                    let bp = b[[r, p]];
                    let bq = b[[r, q]];
                    app = app + bp * bp;
                    aqq = aqq + bq * bq;
                    apq = apq + bp * bq;
                }
                if apq.abs() <= conv_tol * (app * aqq).sqrt() || apq == T::zero() {
                    continue;
                }
                off_diagonal = true;
                let zeta = (aqq - app) / (T::from_f64_c(2.0) * apq);
                let t = {
                    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                    sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let bp = b[[r, p]];
                    let bq = b[[r, q]];
                    b[[r, p]] = c * bp - s * bq;
                    b[[r, q]] = s * bp + c * bq;
                }
                for r in 0..cols {
                    let vp = v[[r, p]];
                    let vq = v[[r, q]];
                    v[[r, p]] = c * vp - s * vq;
                    v[[r, q]] = s * vp + c * vq;
                }
            }
        }
        if !off_diagonal {
            break;
        }
    }
    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<T> = (0..cols)
        .map(|j| b.column(j).iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    order.sort_by(|&a, &bq| norms[bq].partial_cmp(&norms[a]).expect("no NaN"));
    let mut u = Array2::zeros((rows, cols));
    let mut sigma = Array1::zeros(cols);
    let mut vt = Array2::zeros((cols, cols));
    for (j, &src) in order.iter().enumerate() {
        sigma[j] = norms[src];
        if norms[src] > T::zero() {
            let inv = T::one() / norms[src];
            for r in 0..rows {
                u[[r, j]] = b[[r, src]] * inv;
            }
        }
        for r in 0..cols {
            vt[[j, r]] = v[[r, src]];
        }
    }
    complete_orthonormal_columns(&mut u, &sigma);
    Ok((u, sigma, vt))
}

/// Replaces the columns of `u` belonging to zero singular values with an
/// orthonormal completion, so `u` always has orthonormal columns.
fn complete_orthonormal_columns<T: Scalar>(u: &mut Array2<T>, sigma: &Array1<T>) {
    let (rows, cols) = u.dim();
    let first_zero = sigma.iter().position(|&s| s == T::zero());
    let Some(start) = first_zero else { return };
    let mut filled = start;
    let mut seed = 0usize;
    while filled < cols && seed < rows {
        // Candidate basis vector e_seed, orthogonalized twice for stability.
        let mut cand: Array1<T> = Array1::zeros(rows);
        cand[seed] = T::one();
        for _ in 0..2 {
            for j in 0..filled {
                let proj: T = (0..rows).map(|r| u[[r, j]] * cand[r]).sum();
                for r in 0..rows {
                    cand[r] = cand[r] - proj * u[[r, j]];
                }
            }
        }
        let norm = cand.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm > T::from_f64_c(1e-8) {
            for r in 0..rows {
                u[[r, filled]] = cand[r] / norm;
            }
            filled += 1;
        }
        seed += 1;
    }
}

/// Number of leading singular values kept under the trailing-energy rule.
pub fn truncation_rank<T: Scalar>(sigma: &Array1<T>, tol: T, max_rank: usize) -> usize {
    let total: T = sigma.iter().map(|&x| x * x).sum();
    if total == T::zero() {
        return 1.min(max_rank.max(1));
    }
    let budget = tol * tol * total;
    // Walk from the full rank downwards while the discarded tail stays
    // strictly within the error budget; an exact tie keeps the larger rank.
    let mut rank = sigma.len();
    let mut tail = T::zero();
    while rank > 1 {
        let next_tail = tail + sigma[rank - 1] * sigma[rank - 1];
        if next_tail >= budget {
            break;
        }
        tail = next_tail;
        rank -= 1;
    }
    rank.min(max_rank.max(1))
}

/// Truncated SVD `m ≈ U diag(s) Vt` under the shared truncation rule.
pub fn svd_trunc<T: Scalar>(
    m: &ArrayView2<T>,
    tol: T,
    max_rank: usize,
) -> Result<(Array2<T>, Array1<T>, Array2<T>)> {
    let (u, s, vt) = svd(m)?;
    let r = truncation_rank(&s, tol, max_rank);
    Ok((
        u.slice(s![.., ..r]).to_owned(),
        s.slice(s![..r]).to_owned(),
        vt.slice(s![..r, ..]).to_owned(),
    ))
}

/// Thin QR of an arbitrary matrix.
///
/// For wide inputs (rows < cols) the orthogonal factor is produced through an
/// SVD so `Q` always has orthonormal columns and `Q · R` reproduces `m`.
pub fn qr_thin<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array2<T>, Array2<T>)> {
    let (rows, cols) = m.dim();
    if rows >= cols {
        let decomp = m.to_owned().qr().map_err(CoreError::from)?;
        let q = decomp.generate_q();
        let r = decomp.into_r();
        Ok((q, r))
    } else {
        let (u, s, vt) = svd(m)?;
        let mut r = vt;
        for (i, mut row) in r.axis_iter_mut(Axis(0)).enumerate() {
            row.mapv_inplace(|x| x * s[i]);
        }
        Ok((u, r))
    }
}

/// Thin LQ: `m = L · Q` with `Q` having orthonormal rows.
pub fn lq_thin<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array2<T>, Array2<T>)> {
    let mt = m.t().to_owned();
    let (q, r) = qr_thin(&mt.view())?;
    Ok((r.t().to_owned(), q.t().to_owned()))
}

/// Rank-revealing factorization `m = Q · P` with `Q` orthonormal columns.
///
/// Uses thin QR and inspects the diagonal of `R`; if any pivot drops below
/// `RANK_DEFICIENCY_RTOL` times the largest, the factorization is redone with
/// an SVD truncated at the same relative threshold so the returned rank is
/// minimal.
pub fn factor_min_rank<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array2<T>, Array2<T>)> {
    let (q, r) = qr_thin(m)?;
    let diag_max = r
        .diag()
        .iter()
        .map(|x| x.abs())
        .fold(T::zero(), |a, b| if a > b { a } else { b });
    let deficient = diag_max == T::zero()
        || r.diag()
            .iter()
            .any(|x| x.abs() <= T::from_f64_c(RANK_DEFICIENCY_RTOL) * diag_max);
    if !deficient {
        return Ok((q, r));
    }
    let (u, s, vt) = svd(m)?;
    let smax = s[0];
    let mut rank = s
        .iter()
        .take_while(|&&x| x > T::from_f64_c(RANK_DEFICIENCY_RTOL) * smax)
        .count();
    rank = rank.max(1);
    let mut p = vt.slice(s![..rank, ..]).to_owned();
    for (i, mut row) in p.axis_iter_mut(Axis(0)).enumerate() {
        row.mapv_inplace(|x| x * s[i]);
    }
    Ok((u.slice(s![.., ..rank]).to_owned(), p))
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn eigh_asc<T: Scalar>(m: &ArrayView2<T>) -> Result<(Array1<T>, Array2<T>)> {
    let sym = symmetrize(m);
    let pair = sym.eigh().map_err(CoreError::from)?.sort_eig(Order::Smallest);
    Ok(pair)
}

/// `(m + mᵀ)/2`, guarding eigensolves against asymmetric rounding noise.
pub fn symmetrize<T: Scalar>(m: &ArrayView2<T>) -> Array2<T> {
    let half = T::from_f64_c(0.5);
    let mut out = m.to_owned();
    let tr = m.t();
    out.zip_mut_with(&tr, |a, &b| *a = (*a + b) * half);
    out
}

/// Solve `a x = b` for square `a` via QR with an SVD pseudo-inverse fallback.
pub fn solve<T: Scalar>(a: &ArrayView2<T>, b: &ArrayView2<T>) -> Result<Array2<T>> {
    match a.to_owned().qr() {
        Ok(decomp) => match decomp.solve(&b.to_owned()) {
            Ok(x) => Ok(x),
            Err(_) => lstsq(a, b),
        },
        Err(_) => lstsq(a, b),
    }
}

/// Solve a symmetric positive-definite system through Cholesky, falling back
/// to the generic path when the factorization fails.
pub fn solve_spd<T: Scalar>(a: &ArrayView2<T>, b: &ArrayView2<T>) -> Result<Array2<T>> {
    let mut sym = symmetrize(a);
    match sym.solvec(&b.to_owned()) {
        Ok(x) => Ok(x),
        Err(_) => solve(a, b),
    }
}

/// Minimum-norm least-squares solution via the SVD pseudo-inverse.
pub fn lstsq<T: Scalar>(a: &ArrayView2<T>, b: &ArrayView2<T>) -> Result<Array2<T>> {
    let (u, s, vt) = svd(a)?;
    let cutoff = T::from_f64_c(1e-12) * s[0].max(T::epsilon());
    let utb = u.t().dot(b);
    let mut scaled = utb;
    for (i, mut row) in scaled.axis_iter_mut(Axis(0)).enumerate() {
        let inv = if s[i] > cutoff { T::one() / s[i] } else { T::zero() };
        row.mapv_inplace(|x| x * inv);
    }
    Ok(vt.t().dot(&scaled))
}

/// Moore–Penrose pseudo-inverse with relative cutoff `rcond · σ_max`.
pub fn pinv<T: Scalar>(m: &ArrayView2<T>, rcond: T) -> Result<Array2<T>> {
    let (u, s, vt) = svd(m)?;
    let cutoff = rcond * s[0].max(T::epsilon());
    let mut ut = u.t().to_owned();
    for (i, mut row) in ut.axis_iter_mut(Axis(0)).enumerate() {
        let inv = if s[i] > cutoff { T::one() / s[i] } else { T::zero() };
        row.mapv_inplace(|x| x * inv);
    }
    Ok(vt.t().dot(&ut))
}

/// Frobenius norm.
pub fn fro_norm<T: Scalar>(m: &ArrayView2<T>) -> T {
    m.iter().map(|&x| x * x).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn reconstruct(u: &Array2<f64>, s: &Array1<f64>, vt: &Array2<f64>) -> Array2<f64> {
        let mut us = u.clone();
        for (i, mut col) in us.axis_iter_mut(Axis(1)).enumerate() {
            col.mapv_inplace(|x| x * s[i]);
        }
        us.dot(vt)
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = SplitMix64::new(1);
        let m: Array2<f64> = rng.normal_mat(7, 5);
        let (u, s, vt) = svd(&m.view()).unwrap();
        let rec = reconstruct(&u, &s, &vt);
        assert_abs_diff_eq!(rec, m, epsilon = 1e-10);
        assert!(s.windows(2).into_iter().all(|w| w[0] >= w[1]));
    }

    #[test]
    fn truncation_rule_keeps_energy() {
        let s = Array1::from(vec![2.0_f64, 1.0, 1e-9, 1e-10]);
        // tol large enough to drop the two tiny values only
        assert_eq!(truncation_rank(&s, 1e-6, usize::MAX), 2);
        // zero tolerance keeps everything
        assert_eq!(truncation_rank(&s, 0.0, usize::MAX), 4);
        // max_rank wins over energy
        assert_eq!(truncation_rank(&s, 0.0, 3), 3);
    }

    #[test]
    fn qr_of_wide_matrix() {
        let mut rng = SplitMix64::new(2);
        let m: Array2<f64> = rng.normal_mat(3, 6);
        let (q, r) = qr_thin(&m.view()).unwrap();
        assert_abs_diff_eq!(q.dot(&r), m, epsilon = 1e-10);
        assert_abs_diff_eq!(q.t().dot(&q), Array2::eye(3), epsilon = 1e-10);
    }

    #[test]
    fn min_rank_factor_detects_deficiency() {
        let mut rng = SplitMix64::new(3);
        let a: Array2<f64> = rng.normal_mat(6, 2);
        let b: Array2<f64> = rng.normal_mat(2, 5);
        let m = a.dot(&b); // rank 2
        let (q, p) = factor_min_rank(&m.view()).unwrap();
        assert_eq!(q.ncols(), 2);
        assert_abs_diff_eq!(q.dot(&p), m, epsilon = 1e-10);
    }

    #[test]
    fn eigh_sorted_ascending() {
        let m = ndarray::array![[2.0_f64, 1.0], [1.0, 2.0]];
        let (vals, vecs) = eigh_asc(&m.view()).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
        let rec = vecs.dot(&Array2::from_diag(&vals)).dot(&vecs.t());
        assert_abs_diff_eq!(rec, m, epsilon = 1e-12);
    }
}
