//! Block tensor trains: a TT chain in which exactly one core carries an
//! extra mode of size `K`, jointly encoding `K` vectors that share all the
//! other cores. The block core can be moved along the chain by minimum-rank
//! refactorizations, which is the workhorse of sweeping eigensolvers.

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::tt::{fold_left, fold_right, TTTrain};
use ndarray::{s, Array2, Array3, Array4};

/// TT train with one fourth-order core `(Rₙ₋₁, Iₙ, Rₙ, K)`.
#[derive(Clone, Debug)]
pub struct BlockTT<T> {
    left: Vec<Array3<T>>,
    block: Array4<T>,
    right: Vec<Array3<T>>,
}

impl<T: Scalar> BlockTT<T> {
    pub fn new(left: Vec<Array3<T>>, block: Array4<T>, right: Vec<Array3<T>>) -> Result<Self> {
        let out = Self { left, block, right };
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let first_rank = self
            .left
            .first()
            .map(|c| c.dim().0)
            .unwrap_or(self.block.dim().0);
        let last_rank = self
            .right
            .last()
            .map(|c| c.dim().2)
            .unwrap_or(self.block.dim().2);
        if first_rank != 1 || last_rank != 1 {
            return Err(CoreError::ShapeMismatch("boundary ranks must be one".into()));
        }
        let mut prev = 1usize;
        for c in &self.left {
            if c.dim().0 != prev {
                return Err(CoreError::ShapeMismatch("rank chain broken".into()));
            }
            prev = c.dim().2;
        }
        if self.block.dim().0 != prev {
            return Err(CoreError::ShapeMismatch("rank chain broken at block".into()));
        }
        prev = self.block.dim().2;
        for c in &self.right {
            if c.dim().0 != prev {
                return Err(CoreError::ShapeMismatch("rank chain broken".into()));
            }
            prev = c.dim().2;
        }
        Ok(())
    }

    /// Seeded random block train with the block at position 0 and all other
    /// cores right-orthogonal.
    pub fn random(
        mode_sizes: &[usize],
        interior_ranks: &[usize],
        block_size: usize,
        seed: u64,
    ) -> Result<Self> {
        let train = TTTrain::<T>::random(mode_sizes, interior_ranks, seed)?.orthogonalize(0)?;
        let mut cores = train.into_cores();
        let first = cores.remove(0);
        let (r0, i, r1) = first.dim();
        let mut rng = SplitMix64::new(seed ^ 0x5bd1_e995);
        let block = Array4::from_shape_fn((r0, i, r1, block_size), |_| rng.normal());
        Self::new(Vec::new(), block, cores)
    }

    pub fn order(&self) -> usize {
        self.left.len() + 1 + self.right.len()
    }

    pub fn block_position(&self) -> usize {
        self.left.len()
    }

    pub fn block_size(&self) -> usize {
        self.block.dim().3
    }

    pub fn block_core(&self) -> &Array4<T> {
        &self.block
    }

    /// Replaces the block core (ranks and mode size must match).
    pub fn set_block_core(&mut self, core: Array4<T>) -> Result<()> {
        if core.dim().0 != self.block.dim().0
            || core.dim().1 != self.block.dim().1
            || core.dim().3 != self.block.dim().3
        {
            return Err(CoreError::ShapeMismatch("block core shape mismatch".into()));
        }
        // The right rank may change only if there is no core to the right.
        if core.dim().2 != self.block.dim().2 && !self.right.is_empty() {
            return Err(CoreError::ShapeMismatch("block core right rank mismatch".into()));
        }
        self.block = core;
        Ok(())
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.left.iter().map(|c| c.dim().1).collect();
        out.push(self.block.dim().1);
        out.extend(self.right.iter().map(|c| c.dim().1));
        out
    }

    pub fn ranks(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.left.iter().map(|c| c.dim().0).collect();
        out.push(self.block.dim().0);
        out.push(self.block.dim().2);
        out.extend(self.right.iter().map(|c| c.dim().2));
        out
    }

    pub fn left_cores(&self) -> &[Array3<T>] {
        &self.left
    }

    pub fn right_cores(&self) -> &[Array3<T>] {
        &self.right
    }

    /// Extracts the `k`-th represented train.
    pub fn to_train(&self, k: usize) -> Result<TTTrain<T>> {
        if k >= self.block_size() {
            return Err(CoreError::InvalidArgument(format!(
                "column {k} out of range (block size {})",
                self.block_size()
            )));
        }
        let mut cores = self.left.clone();
        cores.push(self.block.slice(s![.., .., .., k]).to_owned());
        cores.extend(self.right.iter().cloned());
        TTTrain::new(cores)
    }

    /// Moves the block one site to the right. The vacated core becomes
    /// left-orthogonal and the internal rank is reduced to the minimum-rank
    /// factorization rank.
    pub fn shift_right(&self) -> Result<Self> {
        if self.right.is_empty() {
            return Err(CoreError::InvalidArgument("block already at the last site".into()));
        }
        let (r0, i, r1, k) = self.block.dim();
        // Stack the K column blocks side by side: (r0·i) × (r1·K).
        let mut m = Array2::zeros((r0 * i, r1 * k));
        for a in 0..r0 {
            for ii in 0..i {
                for b in 0..r1 {
                    for kk in 0..k {
                        m[[a * i + ii, b + r1 * kk]] = self.block[[a, ii, b, kk]];
                    }
                }
            }
        }
        let (q, p) = linalg::factor_min_rank(&m.view())?;
        let r_new = q.ncols();
        let mut left = self.left.clone();
        left.push(fold_left(q, r0, i));
        let mut right = self.right.clone();
        let next = right.remove(0);
        let (_, i1, r2) = next.dim();
        let next_r = crate::tt::right_unfold(&next);
        let mut block = Array4::zeros((r_new, i1, r2, k));
        for kk in 0..k {
            let pk = p.slice(s![.., r1 * kk..r1 * (kk + 1)]);
            let merged = pk.dot(&next_r); // (r_new, i1·r2)
            for q_i in 0..r_new {
                for ii in 0..i1 {
                    for b in 0..r2 {
                        block[[q_i, ii, b, kk]] = merged[[q_i, ii * r2 + b]];
                    }
                }
            }
        }
        Self::new(left, block, right)
    }

    /// Moves the block one site to the left. The vacated core becomes
    /// right-orthogonal.
    pub fn shift_left(&self) -> Result<Self> {
        if self.left.is_empty() {
            return Err(CoreError::InvalidArgument("block already at the first site".into()));
        }
        let (r0, i, r1, k) = self.block.dim();
        // Stack the K row blocks on top of each other: (r0·K) × (i·r1).
        let mut m = Array2::zeros((r0 * k, i * r1));
        for a in 0..r0 {
            for ii in 0..i {
                for b in 0..r1 {
                    for kk in 0..k {
                        m[[a + r0 * kk, ii * r1 + b]] = self.block[[a, ii, b, kk]];
                    }
                }
            }
        }
        // m = Pᵀ · Qᵀ with Q orthonormal columns: factor mᵀ = Q · P.
        let mt = m.t().to_owned();
        let (qm, pm) = linalg::factor_min_rank(&mt.view())?;
        let r_new = qm.ncols();
        let new_core = fold_right(qm.t().to_owned(), i, r1);
        let mut left = self.left.clone();
        let prev = left.pop().expect("nonempty left");
        let (r00, i0, _) = prev.dim();
        let prev_l = crate::tt::left_unfold(&prev); // (r00·i0) × r0
        let mut block = Array4::zeros((r00, i0, r_new, k));
        for kk in 0..k {
            // Pmᵀ rows a + r0·kk, columns q.
            let mut pk = Array2::zeros((r0, r_new));
            for a in 0..r0 {
                for q_i in 0..r_new {
                    pk[[a, q_i]] = pm[[q_i, a + r0 * kk]];
                }
            }
            let merged = prev_l.dot(&pk); // (r00·i0) × r_new
            for a in 0..r00 {
                for ii in 0..i0 {
                    for q_i in 0..r_new {
                        block[[a, ii, q_i, kk]] = merged[[a * i0 + ii, q_i]];
                    }
                }
            }
        }
        let mut right = self.right.clone();
        right.insert(0, new_core);
        Self::new(left, block, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::right_unfold;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn columns_dense(b: &BlockTT<f64>) -> Vec<Vec<f64>> {
        (0..b.block_size())
            .map(|k| b.to_train(k).unwrap().contract_full().to_vec())
            .collect()
    }

    #[test]
    fn shifts_preserve_all_columns() {
        let b = BlockTT::<f64>::random(&[2, 2, 2, 2], &[2, 2, 2], 3, 42).unwrap();
        let before = columns_dense(&b);
        let mut cur = b.clone();
        for _ in 0..3 {
            cur = cur.shift_right().unwrap();
            let now = columns_dense(&cur);
            for (x, y) in before.iter().zip(now.iter()) {
                let err: f64 = x
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let norm: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                assert!(err <= 1e-12 * norm.max(1.0), "err {err}");
            }
        }
        // and back again, ranks not larger than before the round trip
        let ranks_mid = cur.ranks();
        for _ in 0..3 {
            cur = cur.shift_left().unwrap();
        }
        let after = columns_dense(&cur);
        for (x, y) in before.iter().zip(after.iter()) {
            let err: f64 = x
                .iter()
                .zip(y.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-10);
        }
        assert!(cur.ranks().iter().sum::<usize>() <= ranks_mid.iter().sum::<usize>() + 1);
    }

    #[test]
    fn vacated_cores_are_orthogonal() {
        let b = BlockTT::<f64>::random(&[2, 3, 2], &[2, 2], 2, 7).unwrap();
        let shifted = b.shift_right().unwrap();
        let q = crate::tt::left_unfold(&shifted.left_cores()[0]);
        let gram = q.t().dot(&q);
        assert_abs_diff_eq!(gram, Array2::eye(gram.nrows()), epsilon = 1e-12);
        let back = shifted.shift_left().unwrap();
        let r = right_unfold(&back.right_cores()[0]);
        let gram = r.dot(&r.t());
        assert_abs_diff_eq!(gram, Array2::eye(gram.nrows()), epsilon = 1e-12);
    }

    #[test]
    fn single_column_block_reduces_to_orthogonalization() {
        // K = 1: a shift is exactly a QR step of the plain train.
        let b = BlockTT::<f64>::random(&[2, 2, 2], &[2, 2], 1, 5).unwrap();
        let plain = b.to_train(0).unwrap();
        let shifted = b.shift_right().unwrap();
        let moved = shifted.to_train(0).unwrap();
        assert!(moved.rel_err_dense(&plain) < 1e-12);
    }

    #[test]
    fn boundary_shift_errors() {
        let b = BlockTT::<f64>::random(&[2, 2], &[2], 2, 1).unwrap();
        assert!(b.shift_left().is_err());
        let end = b.shift_right().unwrap();
        assert!(end.shift_right().is_err());
    }
}
