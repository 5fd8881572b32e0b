//! Linear systems `A x ≅ b` in TT format by alternating one-site updates
//! with optional residual enrichment.
//!
//! For a symmetric positive-definite operator the Galerkin local system
//! `(X_{≠n}ᵀ A X_{≠n}) c = X_{≠n}ᵀ b` is solved at every site. For general
//! square or overdetermined operators the solver switches to the normal
//! equations, running the same engine on `AᵀA x = Aᵀb`.
//!
//! Enrichment appends the left-projected residual train to the active core
//! before each shift, expanding the frame's column space so the one-site
//! sweep can escape a poor initial rank.

use crate::cache::{
    advance_left, advance_overlap_left, advance_overlap_right, advance_right, check_local_dim,
};
use crate::error::{Result, SolverError};
use crate::report::SolveReport;
use ndarray::{s, Array1, Array2, Array3};
use std::time::Instant;
use ttkit_core::tt::{core_from_vec, fold_left, left_unfold, right_unfold};
use ttkit_core::{linalg, Scalar, TTOperator, TTTrain};

#[derive(Clone, Debug)]
pub struct LinearConfig {
    pub sweeps: usize,
    /// Target relative residual `‖Ax − b‖/‖b‖`.
    pub tol: f64,
    /// Rank cap for the solution train.
    pub max_rank: usize,
    /// Enrichment rank per site (0 = plain one-site sweeps).
    pub enrich_rank: usize,
    /// Use the normal equations (`AᵀA`, `Aᵀb`) instead of the Galerkin
    /// system; required for nonsymmetric or overdetermined operators.
    pub normal_equations: bool,
    /// Tikhonov weight: minimizes `‖Ax−b‖² + γ‖Lx‖²` when `gamma > 0`
    /// (`L` defaults to the identity).
    pub gamma: f64,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self {
            sweeps: 50,
            tol: 1e-10,
            max_rank: 64,
            enrich_rank: 3,
            normal_equations: false,
            gamma: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearSolution<T> {
    pub x: TTTrain<T>,
    pub report: SolveReport,
}

/// Solves `A x ≅ b`, optionally with a Tikhonov term `γ‖Lx‖²`.
pub fn amen_linear<T: Scalar>(
    a: &TTOperator<T>,
    b: &TTTrain<T>,
    x0: &TTTrain<T>,
    regularizer: Option<&TTOperator<T>>,
    cfg: &LinearConfig,
) -> Result<LinearSolution<T>> {
    let start = Instant::now();
    if a.row_sizes() != b.mode_sizes() {
        return Err(SolverError::ShapeMismatch(format!(
            "operator row sizes {:?} vs rhs modes {:?}",
            a.row_sizes(),
            b.mode_sizes()
        )));
    }
    if a.col_sizes() != x0.mode_sizes() {
        return Err(SolverError::ShapeMismatch(format!(
            "operator column sizes {:?} vs x0 modes {:?}",
            a.col_sizes(),
            x0.mode_sizes()
        )));
    }
    let round_tol = T::from_f64_c((cfg.tol / 10.0).max(1e-15));

    // Effective SPD pair (M, rhs): the Galerkin pair (A, b), or the normal
    // equations for rectangular/nonsymmetric systems and ridge problems.
    let use_normal = cfg.normal_equations || cfg.gamma > 0.0 || !a.is_square();
    let (mut m_op, rhs) = if use_normal {
        let at = a.transpose();
        let m = at.compose(a)?.round(T::from_f64_c(1e-14), usize::MAX)?;
        let r = at.apply(b)?.round(T::from_f64_c(1e-14), usize::MAX)?;
        (m, r)
    } else {
        (a.clone(), b.clone())
    };
    if cfg.gamma > 0.0 {
        let l = match regularizer {
            Some(l) => l.transpose().compose(l)?,
            None => TTOperator::identity(&a.col_sizes()),
        };
        m_op = m_op
            .add(&l.scale(T::from_f64_c(cfg.gamma)))?
            .round(T::from_f64_c(1e-14), usize::MAX)?;
    }

    let mut report = SolveReport::new("amen_linear");
    let mut x = x0.round(round_tol, cfg.max_rank)?;
    let b_norm = b.norm();
    let residual = |x: &TTTrain<T>| -> Result<f64> {
        let ax = a.apply(x)?.round(round_tol, usize::MAX)?;
        let r = ax.sub(b)?.round(round_tol, usize::MAX)?;
        let denom = if b_norm > T::zero() { b_norm } else { T::one() };
        Ok((r.norm() / denom).to_f64().unwrap_or(f64::NAN))
    };

    let mut converged = false;
    for sweep in 0..cfg.sweeps {
        x = sweep_once(&m_op, &rhs, x, cfg, round_tol, &mut report)?;
        let res = residual(&x)?;
        report.residual_trace.push(res);
        report.sweeps = sweep + 1;
        if res <= cfg.tol && cfg.gamma == 0.0 {
            converged = true;
            break;
        }
        let len = report.residual_trace.len();
        if cfg.gamma > 0.0 && len >= 2 {
            // ridge systems have a nonzero residual floor: stop on stagnation
            let prev = report.residual_trace[len - 2];
            if (prev - res).abs() <= 1e-12 * prev.abs().max(1e-30) {
                converged = true;
                break;
            }
        }
        if len >= 4 {
            let old = report.residual_trace[len - 4];
            if res > 10.0 * old && res > cfg.tol {
                report.final_residual = Some(res);
                report.final_ranks = x.ranks();
                report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
                return Err(SolverError::Diverged {
                    reason: format!("residual grew from {old:.3e} to {res:.3e} over 3 sweeps"),
                    report: Box::new(report),
                });
            }
        }
    }
    report.converged = converged;
    report.final_residual = report.residual_trace.last().copied();
    report.final_ranks = x.ranks();
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(LinearSolution { x, report })
}

/// One left-to-right sweep of local solves with optional enrichment.
fn sweep_once<T: Scalar>(
    m_op: &TTOperator<T>,
    rhs: &TTTrain<T>,
    x: TTTrain<T>,
    cfg: &LinearConfig,
    round_tol: T,
    report: &mut SolveReport,
) -> Result<TTTrain<T>> {
    let n = x.order();
    let mut x = x.orthogonalize(0)?;
    let a_cores = m_op.cores();

    let make_resid = |x: &TTTrain<T>| -> Result<TTTrain<T>> {
        let ax = m_op.apply(x)?;
        let r = rhs.sub(&ax)?;
        Ok(r.round(round_tol, cfg.max_rank.max(8))?)
    };

    let unit3 = || Array3::from_shape_fn((1, 1, 1), |_| T::one());
    let unit2 = || Array2::from_shape_fn((1, 1), |_| T::one());
    let mut right_m: Vec<Array3<T>> = vec![unit3(); n + 1];
    let mut right_b: Vec<Array2<T>> = vec![unit2(); n + 1];
    for site in (1..n).rev() {
        let xc = x.core(site).view();
        right_m[site] = advance_right(&right_m[site + 1], &xc, &a_cores[site], &xc);
        right_b[site] = advance_overlap_right(&right_b[site + 1], &xc, &rhs.core(site).view());
    }
    let mut left_m: Vec<Array3<T>> = vec![unit3(); n + 1];
    let mut left_b: Vec<Array2<T>> = vec![unit2(); n + 1];

    for site in 0..n {
        let (r0, i_sz, r1) = x.core(site).dim();
        let dim = r0 * i_sz * r1;
        check_local_dim(dim)?;
        let m = crate::evd::effective_matrix(&left_m[site], &a_cores[site], &right_m[site + 1]);
        let bc = rhs.core(site);
        let (rb0, _, rb1) = bc.dim();
        let mut v = Array1::zeros(dim);
        for a in 0..r0 {
            for i in 0..i_sz {
                for b in 0..r1 {
                    let mut acc = T::zero();
                    for beta in 0..rb0 {
                        for beta1 in 0..rb1 {
                            acc = acc
                                + left_b[site][[a, beta]]
                                    * bc[[beta, i, beta1]]
                                    * right_b[site + 1][[b, beta1]];
                        }
                    }
                    v[a + r0 * (i + i_sz * b)] = acc;
                }
            }
        }
        let sol = linalg::solve_spd(&m.view(), &v.clone().insert_axis(ndarray::Axis(1)).view())?;
        let sol = sol.column(0).to_owned();
        let core = core_from_vec(&sol, r0, i_sz, r1).map_err(SolverError::from)?;
        let mc = m.dot(&sol);
        let obj = sol.dot(&mc) - T::from_f64_c(2.0) * sol.dot(&v);
        report.objective_trace.push(obj.to_f64().unwrap_or(f64::NAN));
        x.set_core(site, core).map_err(SolverError::from)?;

        if site == n - 1 {
            break;
        }
        if cfg.enrich_rank > 0 && r1 < cfg.max_rank {
            let resid = make_resid(&x)?;
            let mut lxr = unit2();
            for k in 0..site {
                lxr = advance_overlap_left(&lxr, &x.core(k).view(), &resid.core(k).view());
            }
            let rc = resid.core(site);
            let (rr0, _, rr1) = rc.dim();
            let mut z = Array2::zeros((r0 * i_sz, rr1));
            for a in 0..r0 {
                for i in 0..i_sz {
                    for q in 0..rr1 {
                        let mut acc = T::zero();
                        for p in 0..rr0 {
                            acc = acc + lxr[[a, p]] * rc[[p, i, q]];
                        }
                        z[[a * i_sz + i, q]] = acc;
                    }
                }
            }
            if linalg::fro_norm(&z.view()) > T::zero() {
                let budget = (cfg.max_rank - r1).min(cfg.enrich_rank);
                let (u, sv, _) = linalg::svd_trunc(&z.view(), T::zero(), budget)?;
                let q_new = sv.len();
                let mut us = u;
                for (j, mut col) in us.axis_iter_mut(ndarray::Axis(1)).enumerate() {
                    col.mapv_inplace(|w| w * sv[j]);
                }
                let old = x.core(site).clone();
                let mut widened = Array3::zeros((r0, i_sz, r1 + q_new));
                widened.slice_mut(s![.., .., ..r1]).assign(&old);
                for a in 0..r0 {
                    for i in 0..i_sz {
                        for q in 0..q_new {
                            widened[[a, i, r1 + q]] = us[[a * i_sz + i, q]];
                        }
                    }
                }
                let next = x.core(site + 1).clone();
                let (_, i2, r2) = next.dim();
                let mut padded = Array3::zeros((r1 + q_new, i2, r2));
                padded.slice_mut(s![..r1, .., ..]).assign(&next);
                let mut cores = x.cores().to_vec();
                cores[site] = widened;
                cores[site + 1] = padded;
                x = TTTrain::new(cores).map_err(SolverError::from)?;
                let rm = &right_m[site + 1];
                let (_, ro, rb) = rm.dim();
                let mut ext = Array3::zeros((r1 + q_new, ro, rb));
                ext.slice_mut(s![..r1, .., ..]).assign(rm);
                right_m[site + 1] = ext;
                let rb2 = &right_b[site + 1];
                let mut ext = Array2::zeros((r1 + q_new, rb2.ncols()));
                ext.slice_mut(s![..r1, ..]).assign(rb2);
                right_b[site + 1] = ext;
            }
        }
        // left-orthogonalize the active core, absorbing into the next
        let (r0n, i_n, _) = x.core(site).dim();
        let (q, rmat) = linalg::qr_thin(&left_unfold(x.core(site)).view())?;
        let new_core = fold_left(q, r0n, i_n);
        let nxt = rmat.dot(&right_unfold(x.core(site + 1)));
        let (_, i2, r2) = x.core(site + 1).dim();
        let mut cores = x.cores().to_vec();
        cores[site] = new_core;
        cores[site + 1] = ttkit_core::tt::fold_right(nxt, i2, r2);
        x = TTTrain::new(cores).map_err(SolverError::from)?;
        let xc = x.core(site).view();
        left_m[site + 1] = advance_left(&left_m[site], &xc, &a_cores[site], &xc);
        left_b[site + 1] = advance_overlap_left(&left_b[site], &xc, &rhs.core(site).view());
    }
    Ok(x)
}
