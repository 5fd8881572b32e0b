//! Sweeping symmetric eigensolvers in block-TT format.
//!
//! `K` extremal eigenpairs of a symmetric operator are found by minimizing
//! the block Rayleigh trace `tr(XᵀAX)` under `XᵀX = I`. The `K` eigenvectors
//! share all TT cores except one block core, which sweeps along the chain;
//! at every site the reduced problem built from `X_{≠n}ᵀ A X_{≠n}` is solved
//! by a dense symmetric eigensolver.
//!
//! Three variants share the engine: one-site ALS, two-site MALS with
//! rank-adaptive splitting, and the enriched variant that expands the
//! active core with the projected `A·X` block before each move.

use crate::cache::{advance_left, advance_right, check_local_dim};
use crate::error::{Result, SolverError};
use crate::report::SolveReport;
use ndarray::{s, Array2, Array3, Array4};
use std::time::Instant;
use ttkit_core::{linalg, BlockTT, Scalar, TTOperator};

/// Configuration shared by the eigensolver variants.
#[derive(Clone, Debug)]
pub struct EvdConfig {
    pub sweeps: usize,
    /// Relative objective-change stopping tolerance over a full sweep.
    pub tol: f64,
    /// Rank cap applied by MALS splits and by the enrichment.
    pub max_rank: usize,
    /// Enrichment rank (0 disables enrichment).
    pub enrich_rank: usize,
    /// Relative split tolerance for the MALS supercore factorization.
    pub split_tol: f64,
}

impl Default for EvdConfig {
    fn default() -> Self {
        Self { sweeps: 50, tol: 1e-10, max_rank: 64, enrich_rank: 0, split_tol: 1e-12 }
    }
}

/// Eigensolver output: eigenvalues ascending, eigenvectors as a block train.
#[derive(Clone, Debug)]
pub struct EvdResult<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: BlockTT<T>,
    pub report: SolveReport,
}

#[inline]
fn flat(a: usize, i: usize, b: usize, ra: usize, i_sz: usize) -> usize {
    a + ra * (i + i_sz * b)
}

/// Dense effective operator from the cache blocks; index `(a, i, b)` is
/// flattened column-major.
pub(crate) fn effective_matrix<T: Scalar>(
    left: &Array3<T>,
    op: &Array4<T>,
    right: &Array3<T>,
) -> Array2<T> {
    let (la, lo, lb) = left.dim();
    let (_, i_sz, j_sz, _) = op.dim();
    let (ra, ro, rb) = right.dim();
    let dim_row = la * i_sz * ra;
    let dim_col = lb * j_sz * rb;
    let mut m = Array2::zeros((dim_row, dim_col));
    for a in 0..la {
        for b in 0..lb {
            for alpha in 0..lo {
                let lv = left[[a, alpha, b]];
                if lv == T::zero() {
                    continue;
                }
                for i in 0..i_sz {
                    for j in 0..j_sz {
                        for a2 in 0..ra {
                            for b2 in 0..rb {
                                let mut acc = T::zero();
                                for beta in 0..ro {
                                    acc = acc + op[[alpha, i, j, beta]] * right[[a2, beta, b2]];
                                }
                                m[[flat(a, i, a2, la, i_sz), flat(b, j, b2, lb, j_sz)]] =
                                    m[[flat(a, i, a2, la, i_sz), flat(b, j, b2, lb, j_sz)]]
                                        + lv * acc;
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

/// Merges two neighbouring operator cores; paired modes flatten as
/// `i₁ + I₁·i₂` to match the block supercore layout.
fn merge_op_cores<T: Scalar>(a: &Array4<T>, b: &Array4<T>) -> Array4<T> {
    let (r0, i1, j1, rm) = a.dim();
    let (_, i2, j2, r2) = b.dim();
    let mut out = Array4::zeros((r0, i1 * i2, j1 * j2, r2));
    for x0 in 0..r0 {
        for ia in 0..i1 {
            for ib in 0..i2 {
                for ja in 0..j1 {
                    for jb in 0..j2 {
                        for x2 in 0..r2 {
                            let mut acc = T::zero();
                            for m in 0..rm {
                                acc = acc + a[[x0, ia, ja, m]] * b[[m, ib, jb, x2]];
                            }
                            out[[x0, ia + i1 * ib, ja + j1 * jb, x2]] = acc;
                        }
                    }
                }
            }
        }
    }
    out
}

struct EvdEngine<'a, T> {
    op: &'a TTOperator<T>,
    k: usize,
    cfg: EvdConfig,
    mals: bool,
    name: &'static str,
}

impl<T: Scalar> EvdEngine<'_, T> {
    fn run(&self, x0: BlockTT<T>) -> Result<EvdResult<T>> {
        let start = Instant::now();
        if !self.op.is_square() {
            return Err(SolverError::InvalidArgument(
                "eigenproblem requires a square operator".into(),
            ));
        }
        if self.op.row_sizes() != x0.mode_sizes() {
            return Err(SolverError::ShapeMismatch(format!(
                "operator modes {:?} vs train modes {:?}",
                self.op.row_sizes(),
                x0.mode_sizes()
            )));
        }
        if x0.block_position() != 0 {
            return Err(SolverError::InvalidArgument(
                "initial block must sit at the first site".into(),
            ));
        }
        let mut report = SolveReport::new(self.name);
        let mut x = x0;
        let mut eigenvalues: Vec<T> = Vec::new();
        let mut last_obj = f64::INFINITY;
        let mut converged = false;
        for sweep in 0..self.cfg.sweeps {
            let (nx, vals) = self.full_sweep(x, &mut report)?;
            x = nx;
            eigenvalues = vals;
            let obj: f64 = eigenvalues.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).sum();
            report.sweeps = sweep + 1;
            if (last_obj - obj).abs() <= self.cfg.tol * obj.abs().max(1.0) {
                converged = true;
                break;
            }
            last_obj = obj;
        }
        report.converged = converged;
        report.final_ranks = x.ranks();
        report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(EvdResult { eigenvalues, eigenvectors: x, report })
    }

    fn full_sweep(
        &self,
        mut x: BlockTT<T>,
        report: &mut SolveReport,
    ) -> Result<(BlockTT<T>, Vec<T>)> {
        let n = x.order();
        let a_cores = self.op.cores();
        let unit = || Array3::from_shape_fn((1, 1, 1), |_| T::one());
        // right blocks over the plain cores (block starts at site 0)
        let mut right: Vec<Array3<T>> = vec![unit(); n + 1];
        for site in (1..n).rev() {
            let plain = x.right_cores()[site - 1].view();
            right[site] = advance_right(&right[site + 1], &plain, &a_cores[site], &plain);
        }
        let mut left: Vec<Array3<T>> = vec![unit(); n + 1];

        let mut eigenvalues = Vec::new();
        // forward half-sweep
        let mut site = 0;
        while site < n {
            if self.mals && site + 1 < n {
                eigenvalues =
                    self.mals_step(&mut x, site, &left[site], &right[site + 2], true, report)?;
                let plain = x.left_cores()[site].view();
                left[site + 1] = advance_left(&left[site], &plain, &a_cores[site], &plain);
                site += 1;
                continue;
            }
            eigenvalues = self.one_site_solve(&mut x, site, &left[site], &right[site + 1], report)?;
            if site < n - 1 {
                if self.cfg.enrich_rank > 0 {
                    self.enrich_forward(&mut x, site, &left[site])?;
                }
                x = x.shift_right().map_err(SolverError::from)?;
                let plain = x.left_cores()[site].view();
                left[site + 1] = advance_left(&left[site], &plain, &a_cores[site], &plain);
            }
            site += 1;
        }
        // backward half-sweep
        let mut site = n - 1;
        while site > 0 {
            if self.mals {
                eigenvalues =
                    self.mals_step(&mut x, site - 1, &left[site - 1], &right[site + 1], false, report)?;
                let plain = x.right_cores()[0].view();
                right[site] = advance_right(&right[site + 1], &plain, &a_cores[site], &plain);
                site -= 1;
                continue;
            }
            eigenvalues = self.one_site_solve(&mut x, site, &left[site], &right[site + 1], report)?;
            if self.cfg.enrich_rank > 0 {
                self.enrich_backward(&mut x, site, &right[site + 1])?;
            }
            x = x.shift_left().map_err(SolverError::from)?;
            let plain = x.right_cores()[0].view();
            right[site] = advance_right(&right[site + 1], &plain, &a_cores[site], &plain);
            site -= 1;
        }
        Ok((x, eigenvalues))
    }

    fn one_site_solve(
        &self,
        x: &mut BlockTT<T>,
        site: usize,
        left: &Array3<T>,
        right: &Array3<T>,
        report: &mut SolveReport,
    ) -> Result<Vec<T>> {
        debug_assert_eq!(x.block_position(), site);
        let (r0, i_sz, r1, _) = x.block_core().dim();
        let dim = r0 * i_sz * r1;
        check_local_dim(dim)?;
        if self.k > dim {
            return Err(SolverError::InvalidArgument(format!(
                "requested {} eigenpairs but the local dimension is {dim}",
                self.k
            )));
        }
        let m = effective_matrix(left, &self.op.cores()[site], right);
        let (vals, vecs) = linalg::eigh_asc(&m.view())?;
        let mut new_block = Array4::zeros((r0, i_sz, r1, self.k));
        for kc in 0..self.k {
            for a in 0..r0 {
                for i in 0..i_sz {
                    for b in 0..r1 {
                        new_block[[a, i, b, kc]] = vecs[[flat(a, i, b, r0, i_sz), kc]];
                    }
                }
            }
        }
        x.set_block_core(new_block).map_err(SolverError::from)?;
        let kept: Vec<T> = vals.iter().take(self.k).copied().collect();
        report
            .objective_trace
            .push(kept.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).sum());
        Ok(kept)
    }

    /// Two-site update over the bond `(site, site + 1)`. On the forward pass
    /// (`forward = true`) the block must sit at `site` and lands at
    /// `site + 1`; on the backward pass the block must sit at `site + 1` and
    /// lands at `site`.
    fn mals_step(
        &self,
        x: &mut BlockTT<T>,
        site: usize,
        left: &Array3<T>,
        right: &Array3<T>,
        forward: bool,
        report: &mut SolveReport,
    ) -> Result<Vec<T>> {
        let (r0, i1, i2, r2) = if forward {
            debug_assert_eq!(x.block_position(), site);
            let (r0, i1, _, _) = x.block_core().dim();
            let (_, i2, r2) = x.right_cores()[0].dim();
            (r0, i1, i2, r2)
        } else {
            debug_assert_eq!(x.block_position(), site + 1);
            let (_, i2, r2, _) = x.block_core().dim();
            let prev = x.left_cores().last().expect("left neighbour");
            let (r0, i1, _) = prev.dim();
            (r0, i1, i2, r2)
        };
        let dim = r0 * i1 * i2 * r2;
        check_local_dim(dim)?;
        if self.k > dim {
            return Err(SolverError::InvalidArgument(format!(
                "requested {} eigenpairs but the local dimension is {dim}",
                self.k
            )));
        }
        let merged = merge_op_cores(&self.op.cores()[site], &self.op.cores()[site + 1]);
        let m = effective_matrix(left, &merged, right);
        let (vals, vecs) = linalg::eigh_asc(&m.view())?;
        let kept: Vec<T> = vals.iter().take(self.k).copied().collect();
        report
            .objective_trace
            .push(kept.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).sum());

        // supercore entries: column kc holds S[a, i1, i2, b] flattened as
        // (a, i1 + I1·i2, b) column-major
        let kk = self.k;
        if forward {
            // split with the K mode on the right factor
            let mut unf = Array2::zeros((r0 * i1, i2 * r2 * kk));
            for a in 0..r0 {
                for ia in 0..i1 {
                    for ib in 0..i2 {
                        for b in 0..r2 {
                            for kc in 0..kk {
                                unf[[a + r0 * ia, ib + i2 * (b + r2 * kc)]] =
                                    vecs[[flat(a, ia + i1 * ib, b, r0, i1 * i2), kc]];
                            }
                        }
                    }
                }
            }
            let (u, sv, vt) = linalg::svd_trunc(
                &unf.view(),
                T::from_f64_c(self.cfg.split_tol),
                self.cfg.max_rank,
            )?;
            let r_new = sv.len();
            let mut left_core = Array3::zeros((r0, i1, r_new));
            for a in 0..r0 {
                for ia in 0..i1 {
                    for q in 0..r_new {
                        left_core[[a, ia, q]] = u[[a + r0 * ia, q]];
                    }
                }
            }
            let mut block = Array4::zeros((r_new, i2, r2, kk));
            for q in 0..r_new {
                for ib in 0..i2 {
                    for b in 0..r2 {
                        for kc in 0..kk {
                            block[[q, ib, b, kc]] = sv[q] * vt[[q, ib + i2 * (b + r2 * kc)]];
                        }
                    }
                }
            }
            let mut left_cores = x.left_cores().to_vec();
            let mut right_cores = x.right_cores().to_vec();
            right_cores.remove(0);
            left_cores.push(left_core);
            *x = BlockTT::new(left_cores, block, right_cores).map_err(SolverError::from)?;
        } else {
            // split with the K mode on the left factor
            let mut unf = Array2::zeros((r0 * i1 * kk, i2 * r2));
            for a in 0..r0 {
                for ia in 0..i1 {
                    for ib in 0..i2 {
                        for b in 0..r2 {
                            for kc in 0..kk {
                                unf[[a + r0 * (ia + i1 * kc), ib + i2 * b]] =
                                    vecs[[flat(a, ia + i1 * ib, b, r0, i1 * i2), kc]];
                            }
                        }
                    }
                }
            }
            let (u, sv, vt) = linalg::svd_trunc(
                &unf.view(),
                T::from_f64_c(self.cfg.split_tol),
                self.cfg.max_rank,
            )?;
            let r_new = sv.len();
            let mut block = Array4::zeros((r0, i1, r_new, kk));
            for a in 0..r0 {
                for ia in 0..i1 {
                    for q in 0..r_new {
                        for kc in 0..kk {
                            block[[a, ia, q, kc]] = u[[a + r0 * (ia + i1 * kc), q]] * sv[q];
                        }
                    }
                }
            }
            let mut right_core = Array3::zeros((r_new, i2, r2));
            for q in 0..r_new {
                for ib in 0..i2 {
                    for b in 0..r2 {
                        right_core[[q, ib, b]] = vt[[q, ib + i2 * b]];
                    }
                }
            }
            let mut left_cores = x.left_cores().to_vec();
            left_cores.pop();
            let mut right_cores = x.right_cores().to_vec();
            right_cores.insert(0, right_core);
            *x = BlockTT::new(left_cores, block, right_cores).map_err(SolverError::from)?;
        }
        Ok(kept)
    }

    /// Expands the block core with the left-projected `A·X` directions,
    /// capped at `enrich_rank` by a truncated SVD, zero-padding the right
    /// neighbour. The represented vectors are unchanged.
    fn enrich_forward(&self, x: &mut BlockTT<T>, site: usize, left: &Array3<T>) -> Result<()> {
        let block = x.block_core().clone();
        let (r0, i_sz, r1, k) = block.dim();
        let budget = self.cfg.enrich_rank.min(self.cfg.max_rank.saturating_sub(r1));
        if budget == 0 {
            return Ok(());
        }
        let a_core = &self.op.cores()[site];
        let (_, _, j_sz, ro1) = a_core.dim();
        let (la, lo, lb) = left.dim();
        debug_assert_eq!(la, r0);
        let q_full = ro1 * r1;
        // z[a, i, (β, b), k] = Σ L[a, α, c]·A[α, i, j, β]·X[c, j, b, k]
        let mut zm = Array2::zeros((r0 * i_sz * k, q_full));
        for a in 0..la {
            for i in 0..i_sz {
                for beta in 0..ro1 {
                    for b in 0..r1 {
                        for kc in 0..k {
                            let mut acc = T::zero();
                            for alpha in 0..lo {
                                for c in 0..lb {
                                    for j in 0..j_sz {
                                        acc = acc
                                            + left[[a, alpha, c]]
                                                * a_core[[alpha, i, j, beta]]
                                                * block[[c, j, b, kc]];
                                    }
                                }
                            }
                            zm[[(a * i_sz + i) * k + kc, beta * r1 + b]] = acc;
                        }
                    }
                }
            }
        }
        if linalg::fro_norm(&zm.view()) == T::zero() {
            return Ok(());
        }
        let (u, sv, _) = linalg::svd_trunc(&zm.view(), T::zero(), budget)?;
        let q_new = sv.len();
        let mut us = u;
        for (j, mut col) in us.axis_iter_mut(ndarray::Axis(1)).enumerate() {
            col.mapv_inplace(|v| v * sv[j]);
        }
        let mut enriched = Array4::zeros((r0, i_sz, r1 + q_new, k));
        enriched.slice_mut(s![.., .., ..r1, ..]).assign(&block);
        for a in 0..r0 {
            for i in 0..i_sz {
                for q in 0..q_new {
                    for kc in 0..k {
                        enriched[[a, i, r1 + q, kc]] = us[[(a * i_sz + i) * k + kc, q]];
                    }
                }
            }
        }
        let left_cores = x.left_cores().to_vec();
        let mut right_cores = x.right_cores().to_vec();
        let next = right_cores.remove(0);
        let (_, i2, r2) = next.dim();
        let mut padded = Array3::zeros((r1 + q_new, i2, r2));
        padded.slice_mut(s![..r1, .., ..]).assign(&next);
        right_cores.insert(0, padded);
        let _ = site;
        *x = BlockTT::new(left_cores, enriched, right_cores).map_err(SolverError::from)?;
        Ok(())
    }

    /// Mirror of [`EvdEngine::enrich_forward`] for the right-to-left sweep:
    /// expands the block's left rank with right-projected `A·X` directions,
    /// zero-padding the left neighbour's columns.
    fn enrich_backward(&self, x: &mut BlockTT<T>, site: usize, right: &Array3<T>) -> Result<()> {
        let block = x.block_core().clone();
        let (r0, i_sz, r1, k) = block.dim();
        let budget = self.cfg.enrich_rank.min(self.cfg.max_rank.saturating_sub(r0));
        if budget == 0 {
            return Ok(());
        }
        let a_core = &self.op.cores()[site];
        let (ro0, _, j_sz, _) = a_core.dim();
        let (rb_bra, rb_op, rb_ket) = right.dim();
        debug_assert_eq!(rb_bra, r1);
        let q_full = ro0 * r0;
        // z[(α, a), i, b, k] = Σ A[α, i, j, β]·X[a, j, c, k]·R[b, β, c]
        let mut zm = Array2::zeros((i_sz * r1 * k, q_full));
        for alpha in 0..ro0 {
            for a in 0..r0 {
                for i in 0..i_sz {
                    for b in 0..r1 {
                        for kc in 0..k {
                            let mut acc = T::zero();
                            for beta in 0..rb_op {
                                for c in 0..rb_ket {
                                    for j in 0..j_sz {
                                        acc = acc
                                            + a_core[[alpha, i, j, beta]]
                                                * block[[a, j, c, kc]]
                                                * right[[b, beta, c]];
                                    }
                                }
                            }
                            zm[[(i * r1 + b) * k + kc, alpha * r0 + a]] = acc;
                        }
                    }
                }
            }
        }
        if linalg::fro_norm(&zm.view()) == T::zero() {
            return Ok(());
        }
        let (u, sv, _) = linalg::svd_trunc(&zm.view(), T::zero(), budget)?;
        let q_new = sv.len();
        let mut us = u;
        for (j, mut col) in us.axis_iter_mut(ndarray::Axis(1)).enumerate() {
            col.mapv_inplace(|v| v * sv[j]);
        }
        let mut enriched = Array4::zeros((r0 + q_new, i_sz, r1, k));
        enriched.slice_mut(s![..r0, .., .., ..]).assign(&block);
        for i in 0..i_sz {
            for b in 0..r1 {
                for q in 0..q_new {
                    for kc in 0..k {
                        enriched[[r0 + q, i, b, kc]] = us[[(i * r1 + b) * k + kc, q]];
                    }
                }
            }
        }
        let mut left_cores = x.left_cores().to_vec();
        let prev = left_cores.pop().expect("left neighbour");
        let (p0, i0, _) = prev.dim();
        let mut padded = Array3::zeros((p0, i0, r0 + q_new));
        padded.slice_mut(s![.., .., ..r0]).assign(&prev);
        left_cores.push(padded);
        let right_cores = x.right_cores().to_vec();
        *x = BlockTT::new(left_cores, enriched, right_cores).map_err(SolverError::from)?;
        Ok(())
    }
}

/// One-site ALS eigensolver for the `K` smallest eigenpairs.
pub fn als_evd<T: Scalar>(
    op: &TTOperator<T>,
    k: usize,
    x0: BlockTT<T>,
    cfg: &EvdConfig,
) -> Result<EvdResult<T>> {
    let cfg = EvdConfig { enrich_rank: 0, ..cfg.clone() };
    EvdEngine { op, k, cfg, mals: false, name: "als_evd" }.run(x0)
}

/// Two-site (rank-adaptive) eigensolver.
pub fn mals_evd<T: Scalar>(
    op: &TTOperator<T>,
    k: usize,
    x0: BlockTT<T>,
    cfg: &EvdConfig,
) -> Result<EvdResult<T>> {
    EvdEngine { op, k, cfg: cfg.clone(), mals: true, name: "mals_evd" }.run(x0)
}

/// Enriched one-site eigensolver; with `enrich_rank = 0` the trajectory
/// coincides with [`als_evd`] exactly.
pub fn evamen<T: Scalar>(
    op: &TTOperator<T>,
    k: usize,
    x0: BlockTT<T>,
    cfg: &EvdConfig,
) -> Result<EvdResult<T>> {
    EvdEngine { op, k, cfg: cfg.clone(), mals: false, name: "evamen" }.run(x0)
}

/// Seeded random block start (block at site 0, rest right-orthogonal).
pub fn random_start<T: Scalar>(
    mode_sizes: &[usize],
    ranks: &[usize],
    k: usize,
    seed: u64,
) -> Result<BlockTT<T>> {
    BlockTT::random(mode_sizes, ranks, k, seed).map_err(SolverError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use ttkit_core::SplitMix64;

    fn diag_operator(values: &[f64], sizes: &[usize]) -> TTOperator<f64> {
        let mut m = Array2::zeros((values.len(), values.len()));
        for (i, &v) in values.iter().enumerate() {
            m[[i, i]] = v;
        }
        TTOperator::from_dense_matrix(&m, sizes, sizes, 1e-14, usize::MAX).unwrap()
    }

    #[test]
    fn identity_operator_gives_unit_eigenvalue() {
        let op = TTOperator::<f64>::identity(&[2, 2, 2]);
        let x0 = random_start(&[2, 2, 2], &[2, 2], 1, 3).unwrap();
        let res = als_evd(&op, 1, x0, &EvdConfig::default()).unwrap();
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert!(res.report.objective_is_monotone(1e-9));
    }

    #[test]
    fn diagonal_operator_two_smallest() {
        let vals: Vec<f64> = (1..=16).map(|v| v as f64).collect();
        let sizes = [2usize, 2, 2, 2];
        let op = diag_operator(&vals, &sizes);
        let x0 = random_start(&sizes, &[4, 4, 4], 2, 7).unwrap();
        let res = als_evd(&op, 2, x0, &EvdConfig::default()).unwrap();
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-8, "{:?}", res.eigenvalues);
        assert!((res.eigenvalues[1] - 2.0).abs() < 1e-8, "{:?}", res.eigenvalues);
        assert!(res.report.objective_is_monotone(1e-9));
    }

    #[test]
    fn mals_adapts_ranks_from_rank_one_start() {
        // diagonal case: eigenvalues recovered exactly even from rank-1 init
        let vals: Vec<f64> = (1..=16).map(|v| v as f64).collect();
        let sizes = [2usize, 2, 2, 2];
        let op = diag_operator(&vals, &sizes);
        let x0 = random_start(&sizes, &[1, 1, 1], 2, 5).unwrap();
        let cfg = EvdConfig { max_rank: 8, split_tol: 1e-10, ..Default::default() };
        let res = mals_evd(&op, 2, x0, &cfg).unwrap();
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-8, "{:?}", res.eigenvalues);
        assert!((res.eigenvalues[1] - 2.0).abs() < 1e-8, "{:?}", res.eigenvalues);

        // dense symmetric case: the minimizer genuinely needs rank growth
        let mut rng = SplitMix64::new(20);
        let raw: Array2<f64> = rng.normal_mat(16, 16);
        let sym = (&raw + &raw.t()).mapv(|v| 0.5 * v);
        let op = TTOperator::from_dense_matrix(&sym, &sizes, &sizes, 1e-14, usize::MAX).unwrap();
        let dense_eigs = ttkit_core::linalg::eigh_asc(&sym.view()).unwrap().0;
        let x0 = random_start(&sizes, &[1, 1, 1], 1, 6).unwrap();
        let res = mals_evd(&op, 1, x0, &cfg).unwrap();
        assert!(
            (res.eigenvalues[0] - dense_eigs[0]).abs() < 1e-8,
            "{} vs {}",
            res.eigenvalues[0],
            dense_eigs[0]
        );
        assert!(res.eigenvectors.ranks().iter().any(|&r| r > 1));
    }

    #[test]
    fn mals_identity_converges_in_one_sweep() {
        let op = TTOperator::<f64>::identity(&[2, 2, 2]);
        let x0 = random_start(&[2, 2, 2], &[2, 2], 1, 9).unwrap();
        let cfg = EvdConfig { sweeps: 1, ..Default::default() };
        let res = mals_evd(&op, 1, x0, &cfg).unwrap();
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evamen_with_zero_enrichment_matches_als_exactly() {
        let mut rng = SplitMix64::new(4);
        let raw: Array2<f64> = rng.normal_mat(8, 8);
        let sym = (&raw + &raw.t()).mapv(|v| 0.5 * v);
        let sizes = [2usize, 2, 2];
        let op = TTOperator::from_dense_matrix(&sym, &sizes, &sizes, 1e-14, usize::MAX).unwrap();
        let cfg = EvdConfig { sweeps: 4, ..Default::default() };
        let x0 = random_start(&sizes, &[2, 2], 1, 11).unwrap();
        let a = als_evd(&op, 1, x0.clone(), &cfg).unwrap();
        let b = evamen(&op, 1, x0, &EvdConfig { enrich_rank: 0, ..cfg }).unwrap();
        assert_eq!(a.report.objective_trace, b.report.objective_trace);
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn evamen_diagonal_three_smallest() {
        let vals: Vec<f64> = (1..=16).map(|v| v as f64).collect();
        let sizes = [2usize, 2, 2, 2];
        let op = diag_operator(&vals, &sizes);
        let x0 = random_start(&sizes, &[2, 2, 2], 3, 13).unwrap();
        let cfg = EvdConfig { enrich_rank: 2, max_rank: 12, ..Default::default() };
        let res = evamen(&op, 3, x0, &cfg).unwrap();
        for (got, want) in res.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-7, "{:?}", res.eigenvalues);
        }
    }
}
