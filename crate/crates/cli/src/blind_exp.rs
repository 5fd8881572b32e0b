//! Blind identification of a 2×R mixing matrix from higher-order derivative
//! tensors of the observations' second characteristic function: three
//! derivative tensors (at the two leading left singular vectors of the data
//! and one collinearity-controlled random point) are stacked and decomposed
//! by a CP model whose leading factors share the mixing matrix.

use crate::config::BlindIdentConfig;
use crate::error::{CliError, Result};
use crate::pool::run_seeds;
use crate::sae::{msae_db, sae_db};
use ndarray::{Array1, Array2};
use serde::Serialize;
use ttkit_core::{linalg, SplitMix64};
use ttkit_solvers::{cp_als, CpConfig};
use ttkit_tensorize::derivative_stack;

#[derive(Clone, Debug, Serialize)]
pub struct BlindSeedScore {
    pub seed: u64,
    /// MSAE per requested derivative order.
    pub msae_db: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlindResult {
    pub orders: Vec<usize>,
    pub per_seed: Vec<BlindSeedScore>,
    pub mean_msae_db: Vec<f64>,
}

/// One copy of every ±1 pattern over `r` sources (exact statistics).
pub fn all_sign_patterns(r: usize) -> Array2<f64> {
    let t = 1usize << r;
    let mut s = Array2::<f64>::zeros((r, t));
    for col in 0..t {
        for row in 0..r {
            s[[row, col]] = if (col >> row) & 1 == 1 { 1.0 } else { -1.0 };
        }
    }
    s
}

fn run_one(cfg: &BlindIdentConfig, seed: u64) -> Result<BlindSeedScore> {
    let r = cfg.sources;
    let mut rng = SplitMix64::new(seed);
    let sources = if cfg.exact_statistics {
        all_sign_patterns(r)
    } else {
        let t_len = cfg.samples.unwrap_or(100 * (1usize << r));
        let mut s = Array2::<f64>::zeros((r, t_len));
        for v in s.iter_mut() {
            *v = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
        }
        s
    };
    let mut h = Array2::<f64>::zeros((2, r));
    for c in 0..r {
        let a = rng.next_normal();
        let b = rng.next_normal();
        let n = (a * a + b * b).sqrt();
        h[[0, c]] = a / n;
        h[[1, c]] = b / n;
    }
    let mut x = h.dot(&sources);
    if let Some(snr) = cfg.snr_db {
        if !cfg.exact_statistics {
            let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
            let sigma = rms * 10f64.powf(-snr / 20.0);
            for v in x.iter_mut() {
                *v += sigma * rng.next_normal();
            }
        }
    }
    // processing points: leading left singular vectors plus, per stack, a
    // random point with controlled collinearity to the first one
    let gram = x.dot(&x.t());
    let (_vals, vecs) = linalg::eigh_asc(&gram.view())?;
    let u1 = vecs.column(1).to_owned();
    let u2 = vecs.column(0).to_owned();
    let perp = Array1::from(vec![-u1[1], u1[0]]);
    let scale = cfg.point_scale.unwrap_or(0.8);
    let n_stacks = if cfg.exact_statistics { 1 } else { cfg.stacks.unwrap_or(8) };
    let restarts = cfg.cp_restarts.unwrap_or(3).max(1) as u64;
    // fresh random points per stack, shared across orders for pairing
    let colls: Vec<f64> = (0..n_stacks).map(|_| -0.99 + 1.98 * rng.next_f64()).collect();

    let mut msaes = Vec::with_capacity(cfg.orders.len());
    for &order in &cfg.orders {
        if !(3..=8).contains(&order) {
            return Err(CliError::Config(format!(
                "derivative order {order} outside 3..=8"
            )));
        }
        let mut stack_scores = Vec::with_capacity(n_stacks);
        for &coll in &colls {
            let u3 = {
                let mut v = Array1::<f64>::zeros(2);
                for i in 0..2 {
                    v[i] = coll * u1[i] + (1.0 - coll * coll).sqrt() * perp[i];
                }
                v
            };
            let points: Vec<Array1<f64>> = vec![
                u1.mapv(|v| v * scale),
                u2.mapv(|v| v * scale),
                u3.mapv(|v| v * scale),
            ];
            let stack = derivative_stack(&x.view(), &points, order, true)?;
            let mut best_cp: Option<ttkit_solvers::CpDecomposition<f64>> = None;
            for restart in 0..restarts {
                let cp = cp_als(
                    &stack,
                    &CpConfig {
                        rank: r,
                        iters: cfg.cp_iters.unwrap_or(300),
                        tol: 1e-12,
                        seed: seed ^ (restart * 7919 + ((order as u64) << 8) + 7),
                        symmetric_modes: order,
                    },
                )?;
                if best_cp.as_ref().map(|b| cp.fit > b.fit).unwrap_or(true) {
                    best_cp = Some(cp);
                }
            }
            let cp = best_cp.expect("at least one restart");
            let est = &cp.factors[0]; // shared mixing-factor estimate (2 × R)
            // greedy column matching against the truth
            let mut used = vec![false; r];
            let mut saes = Vec::with_capacity(r);
            for c in 0..r {
                let truth = [h[[0, c]], h[[1, c]]];
                let mut best: Option<(usize, f64)> = None;
                for j in 0..r {
                    if used[j] {
                        continue;
                    }
                    let cand = [est[[0, j]], est[[1, j]]];
                    let nc = (cand[0] * cand[0] + cand[1] * cand[1]).sqrt();
                    if nc == 0.0 {
                        continue;
                    }
                    let corr = (truth[0] * cand[0] + truth[1] * cand[1]).abs() / nc;
                    if best.map(|(_, c0)| corr > c0).unwrap_or(true) {
                        best = Some((j, corr));
                    }
                }
                match best {
                    Some((j, _)) => {
                        used[j] = true;
                        saes.push(sae_db(&truth, &[est[[0, j]], est[[1, j]]]));
                    }
                    None => saes.push(f64::NEG_INFINITY),
                }
            }
            stack_scores.push(msae_db(&saes));
        }
        msaes.push(stack_scores.iter().sum::<f64>() / stack_scores.len() as f64);
    }
    Ok(BlindSeedScore { seed, msae_db: msaes })
}

pub fn run(cfg: &BlindIdentConfig) -> Result<BlindResult> {
    if cfg.sources < 2 {
        return Err(CliError::Config("need at least two sources".into()));
    }
    let outcomes = run_seeds(&cfg.seeds, |seed| run_one(cfg, seed));
    let per_seed: Vec<BlindSeedScore> = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let mut mean = vec![0.0f64; cfg.orders.len()];
    for s in &per_seed {
        for (m, v) in mean.iter_mut().zip(s.msae_db.iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= per_seed.len() as f64;
    }
    Ok(BlindResult { orders: cfg.orders.clone(), per_seed, mean_msae_db: mean })
}

pub fn result_table(result: &BlindResult) -> crate::csvio::CsvTable {
    let mut table = crate::csvio::CsvTable::new(&["seed", "order", "msae_db"]);
    for s in &result.per_seed {
        for (o, v) in result.orders.iter().zip(s.msae_db.iter()) {
            table.push_row(vec![
                s.seed.to_string(),
                o.to_string(),
                crate::csvio::format_value(*v),
            ]);
        }
    }
    for (o, v) in result.orders.iter().zip(result.mean_msae_db.iter()) {
        table.push_row(vec![
            "mean".to_string(),
            o.to_string(),
            crate::csvio::format_value(*v),
        ]);
    }
    table
}
