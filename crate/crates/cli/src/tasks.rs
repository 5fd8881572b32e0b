//! Thin task runners behind `ttkit solve|eig|complete|regress`: build the
//! problem (fixture or files), run the solver, emit a JSON report plus
//! TT1F/CSV artifacts. Exit code 2 signals non-convergence.

use crate::config::{FixtureConfig, SolverTaskConfig};
use crate::error::{CliError, Result};
use crate::fixtures;
use serde_json::json;
use std::path::{Path, PathBuf};
use ttkit_core::{io as ttio, DenseTensor, SplitMix64, TTOperator, TTTrain};
use ttkit_regression::holrr_fit;
use ttkit_solvers::{
    als_evd, amen_linear, evamen, mals_evd, tt_complete, CompletionConfig, EvdConfig,
    LinearConfig, SamplingSet, SolveReport,
};

pub struct TaskOutcome {
    pub report: serde_json::Value,
    pub converged: bool,
}

impl TaskOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            2
        }
    }
}

fn report_json(report: &SolveReport) -> serde_json::Value {
    serde_json::to_value(report).expect("serializable report")
}

fn load_operator(cfg: &SolverTaskConfig) -> Result<TTOperator<f64>> {
    if let Some(fix) = &cfg.fixture {
        return fixtures::operator_from_fixture(fix);
    }
    if let Some(path) = &cfg.operator_file {
        return Ok(ttio::load_operator(Path::new(path))?);
    }
    Err(CliError::Config("no operator fixture or file given".into()))
}

fn load_rhs(cfg: &SolverTaskConfig, op: &TTOperator<f64>) -> Result<TTTrain<f64>> {
    if let Some(path) = &cfg.rhs_file {
        return Ok(ttio::load_train(Path::new(path))?);
    }
    // default: b = A·x* for a seeded random rank-2 solution (known answer)
    let sizes = op.col_sizes();
    let x_true = TTTrain::<f64>::random(&sizes, &vec![2; sizes.len().saturating_sub(1)], cfg.seed)?;
    Ok(op.apply(&x_true)?.round(1e-13, usize::MAX)?)
}

pub fn run_solve(cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    let op = load_operator(cfg)?;
    let b = load_rhs(cfg, &op)?;
    let sizes = op.col_sizes();
    let x0 = TTTrain::<f64>::random(&sizes, &vec![1; sizes.len().saturating_sub(1)], cfg.seed ^ 1)?;
    let lin_cfg = LinearConfig {
        sweeps: cfg.sweeps,
        tol: cfg.tol,
        max_rank: cfg.max_rank,
        enrich_rank: cfg.enrich_rank.unwrap_or(3),
        normal_equations: cfg.solver == "amen_normal",
        gamma: cfg.gamma.unwrap_or(0.0),
    };
    let sol = amen_linear(&op, &b, &x0, None, &lin_cfg)?;
    ttio::save_train(&out_dir.join("solution.tt"), &sol.x)?;
    let converged = sol.report.converged;
    let mut report = report_json(&sol.report);
    report["task"] = json!("solve");
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(TaskOutcome { report, converged })
}

pub fn run_eig(cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    let op = load_operator(cfg)?;
    let sizes = op.col_sizes();
    let k = cfg.num_eigenpairs.unwrap_or(1);
    let x0 = ttkit_core::BlockTT::<f64>::random(
        &sizes,
        &vec![1; sizes.len().saturating_sub(1)],
        k,
        cfg.seed,
    )?;
    let evd_cfg = EvdConfig {
        sweeps: cfg.sweeps,
        tol: cfg.tol,
        max_rank: cfg.max_rank.min(16),
        enrich_rank: cfg.enrich_rank.unwrap_or(3),
        split_tol: 1e-12,
    };
    let res = match cfg.solver.as_str() {
        "als" => als_evd(&op, k, x0, &evd_cfg)?,
        "mals" => mals_evd(&op, k, x0, &evd_cfg)?,
        "evamen" | "amen" => evamen(&op, k, x0, &evd_cfg)?,
        other => return Err(CliError::Config(format!("unknown eigensolver {other:?}"))),
    };
    for kk in 0..k {
        let train = res.eigenvectors.to_train(kk)?;
        ttio::save_train(&out_dir.join(format!("eigenvector_{kk}.tt")), &train)?;
    }
    let converged = res.report.converged;
    let mut report = report_json(&res.report);
    report["task"] = json!("eig");
    report["eigenvalues"] = json!(res.eigenvalues);
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(TaskOutcome { report, converged })
}

fn load_samples(
    cfg: &SolverTaskConfig,
) -> Result<(Vec<usize>, Vec<usize>, SamplingSet<f64>, Option<TTTrain<f64>>)> {
    if let Some(FixtureConfig::LowRankSample { mode_sizes, ranks, fraction, seed }) = &cfg.fixture
    {
        let fix = fixtures::completion_fixture(mode_sizes, ranks, *fraction, *seed)?;
        return Ok((mode_sizes.clone(), ranks.clone(), fix.omega, Some(fix.truth)));
    }
    let (Some(mode_sizes), Some(target_ranks)) = (&cfg.mode_sizes, &cfg.target_ranks) else {
        return Err(CliError::Config(
            "completion needs mode_sizes and target_ranks (or a fixture)".into(),
        ));
    };
    let Some(path) = &cfg.samples_file else {
        return Err(CliError::Config("completion needs a samples_file".into()));
    };
    // sample rows: i1,i2,…,iN,value
    let text = std::fs::read_to_string(path)?;
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != mode_sizes.len() + 1 {
            return Err(CliError::Config(format!("bad sample row {line:?}")));
        }
        let idx: Vec<usize> = toks[..mode_sizes.len()]
            .iter()
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad index in {line:?}: {e}")))?;
        let value: f64 = toks[mode_sizes.len()]
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("bad value in {line:?}: {e}")))?;
        indices.push(idx);
        values.push(value);
    }
    let omega = SamplingSet::new(mode_sizes, indices, values)?;
    Ok((mode_sizes.clone(), target_ranks.clone(), omega, None))
}

pub fn run_complete(cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    let (mode_sizes, target_ranks, omega, truth) = load_samples(cfg)?;
    let comp_cfg = CompletionConfig {
        sweeps: cfg.sweeps,
        tol: cfg.tol,
        seed: cfg.seed,
        ..Default::default()
    };
    let (x, solve_report) = tt_complete(&mode_sizes, &omega, &target_ranks, &comp_cfg)?;
    ttio::save_train(&out_dir.join("completed.tt"), &x)?;
    let converged = solve_report.converged;
    let mut report = report_json(&solve_report);
    report["task"] = json!("complete");
    if let Some(truth) = truth {
        let err = x.rel_err_dense(&truth);
        report["held_out_relative_error"] = json!(err);
    }
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(TaskOutcome { report, converged })
}

fn b64(bytes: &[u8]) -> String {
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(bytes.len().div_ceil(3) * 4);
    for chunk in bytes.chunks(3) {
        let b = [
            chunk[0],
            chunk.get(1).copied().unwrap_or(0),
            chunk.get(2).copied().unwrap_or(0),
        ];
        let n = ((b[0] as u32) << 16) | ((b[1] as u32) << 8) | b[2] as u32;
        out.push(TABLE[(n >> 18) as usize & 63] as char);
        out.push(TABLE[(n >> 12) as usize & 63] as char);
        out.push(if chunk.len() > 1 { TABLE[(n >> 6) as usize & 63] as char } else { '=' });
        out.push(if chunk.len() > 2 { TABLE[n as usize & 63] as char } else { '=' });
    }
    out
}

fn dense_to_json(t: &DenseTensor<f64>) -> serde_json::Value {
    let mut bytes = Vec::with_capacity(t.len() * 8);
    for v in t.to_vec() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    json!({ "mode_sizes": t.mode_sizes(), "data_b64": b64(&bytes) })
}

fn matrix_to_json(m: &ndarray::Array2<f64>) -> serde_json::Value {
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for v in m.iter() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data_b64": b64(&bytes) })
}

pub fn run_regress(cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    if cfg.solver == "exm" {
        return run_exm(cfg, out_dir);
    }
    if cfg.solver != "holrr" {
        return Err(CliError::Config(format!(
            "unknown regression solver {:?} (supported: holrr, exm)",
            cfg.solver
        )));
    }
    let (x, y, x_test, y_test, ranks, gamma) = match &cfg.fixture {
        Some(FixtureConfig::HolrrDemo { samples, seed }) => {
            let demo = fixtures::holrr_demo(*samples, *seed)?;
            (demo.x, demo.y, Some(demo.x_test), Some(demo.y_test), demo.ranks, demo.gamma)
        }
        _ => {
            let Some(path) = &cfg.dataset_file else {
                return Err(CliError::Config(
                    "regress needs a dataset_file or the holrr_demo fixture".into(),
                ));
            };
            let (rows, mode_sizes, targets) = crate::csvio::read_dataset(Path::new(path))?;
            let _ = targets;
            // first column block = input vector, remainder = response entries
            let (i0, ysizes) = (mode_sizes[0], mode_sizes[1..].to_vec());
            let m = rows.len();
            let mut x = ndarray::Array2::<f64>::zeros((m, i0));
            let mut ysz = vec![m];
            ysz.extend_from_slice(&ysizes);
            let mut yv = Vec::with_capacity(m * ysizes.iter().product::<usize>());
            // column-major assembly over (sample, response…)
            let per = ysizes.iter().product::<usize>();
            let mut flat_rows = Vec::with_capacity(m);
            for (s, row) in rows.iter().enumerate() {
                if row.len() != i0 + per {
                    return Err(CliError::Config(format!(
                        "row {s} has {} values, expected {}",
                        row.len(),
                        i0 + per
                    )));
                }
                for j in 0..i0 {
                    x[[s, j]] = row[j];
                }
                flat_rows.push(row[i0..].to_vec());
            }
            for j in 0..per {
                for row in flat_rows.iter() {
                    yv.push(row[j]);
                }
            }
            let y = DenseTensor::from_vec(&ysz, yv)?;
            let ranks = cfg.ranks.clone().unwrap_or_else(|| {
                let mut r = vec![i0.min(4)];
                r.extend(ysizes.iter().map(|&s| s.min(4)));
                r
            });
            (x, y, None, None, ranks, cfg.gamma.unwrap_or(1e-6))
        }
    };
    let model = holrr_fit(&x, &y, &ranks, gamma)?;
    // training RMSE
    let m = x.nrows();
    let mut sse = 0.0;
    let mut count = 0.0;
    for s in 0..m {
        let pred = model.predict(&x.row(s).to_owned())?;
        let pv = pred.to_vec();
        for (j, &v) in pv.iter().enumerate() {
            let mut idx = vec![s];
            idx.extend(decode_index(j, &pred.mode_sizes().to_vec()));
            let d = v - y.get(&idx);
            sse += d * d;
            count += 1.0;
        }
    }
    let train_rmse = (sse / count).sqrt();
    let test_rmse = match (&x_test, &y_test) {
        (Some(xt), Some(yt)) => {
            let mut sse = 0.0;
            let mut count = 0.0;
            for s in 0..xt.nrows() {
                let pred = model.predict(&xt.row(s).to_owned())?;
                let pv = pred.to_vec();
                for (j, &v) in pv.iter().enumerate() {
                    let mut idx = vec![s];
                    idx.extend(decode_index(j, &pred.mode_sizes().to_vec()));
                    let d = v - yt.get(&idx);
                    sse += d * d;
                    count += 1.0;
                }
            }
            Some((sse / count).sqrt())
        }
        _ => None,
    };
    let model_json = json!({
        "kind": "holrr",
        "gamma": gamma,
        "ranks": ranks,
        "core": dense_to_json(&model.core),
        "factors": model.factors.iter().map(matrix_to_json).collect::<Vec<_>>(),
    });
    std::fs::write(out_dir.join("model.json"), serde_json::to_string_pretty(&model_json)?)?;
    let report = json!({
        "task": "regress",
        "solver": "holrr",
        "train_rmse": train_rmse,
        "test_rmse": test_rmse,
        "ranks": ranks,
    });
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(TaskOutcome { report, converged: true })
}

/// Exponential-machine training from a CSV dataset: each row is a feature
/// vector, targets come from the sidecar. Writes the trace as JSON lines.
fn run_exm(cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    let Some(path) = &cfg.dataset_file else {
        return Err(CliError::Config("exm needs a dataset_file".into()));
    };
    let (rows, _mode_sizes, targets) = crate::csvio::read_dataset(Path::new(path))?;
    let Some(targets) = targets else {
        return Err(CliError::Config("exm dataset sidecar must carry targets".into()));
    };
    if rows.is_empty() || targets.len() != rows.len() {
        return Err(CliError::Config("one target per dataset row is required".into()));
    }
    let n = rows[0].len();
    let mut data = ndarray::Array2::<f64>::zeros((rows.len(), n));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Config(format!("row {i} has inconsistent length")));
        }
        for (j, &v) in row.iter().enumerate() {
            data[[i, j]] = v;
        }
    }
    let exm_cfg = ttkit_riemannian::ExmConfig {
        rank: cfg.ranks.as_ref().and_then(|r| r.first().copied()).unwrap_or(2),
        iters: cfg.sweeps.max(1) * 10,
        minibatch: 16,
        lambda: cfg.gamma.unwrap_or(0.0),
        seed: cfg.seed,
        ..Default::default()
    };
    let model = ttkit_riemannian::exm_fit(&data, &targets, &exm_cfg)?;
    std::fs::write(out_dir.join("exm_trace.jsonl"), model.trace_jsonl())?;
    let mut sse = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let pred = model.predict(&data.row(i).to_owned())?;
        sse += (pred - t) * (pred - t);
    }
    let rmse = (sse / targets.len() as f64).sqrt();
    let report = json!({
        "task": "regress",
        "solver": "exm",
        "train_rmse": rmse,
        "rank": exm_cfg.rank,
        "final_loss": model.trace.last().map(|e| e.loss),
    });
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(TaskOutcome { report, converged: true })
}

fn decode_index(flat: usize, sizes: &Vec<usize>) -> Vec<usize> {
    let mut rem = flat;
    sizes
        .iter()
        .map(|&s| {
            let i = rem % s;
            rem /= s;
            i
        })
        .collect()
}

/// `ttkit tt` subcommands.
pub mod ttfile {
    use super::*;
    use ttkit_core::io::TtFile;

    pub fn info(input: &Path) -> Result<String> {
        let any: TtFile<f64> = ttio::load_any(input)?;
        let text = match any {
            TtFile::Train(t) => {
                let bytes: usize = t.num_parameters() * 8;
                format!(
                    "kind: train\norder: {}\nmode sizes: {}\nranks: {}\nstorage bytes: {}\n",
                    t.order(),
                    join(&t.mode_sizes()),
                    join(&t.ranks()),
                    bytes
                )
            }
            TtFile::Operator(o) => {
                let bytes: usize =
                    o.cores().iter().map(|c| c.len()).sum::<usize>() * 8;
                format!(
                    "kind: operator\norder: {}\nrow sizes: {}\ncol sizes: {}\nranks: {}\nstorage bytes: {}\n",
                    o.order(),
                    join(&o.row_sizes()),
                    join(&o.col_sizes()),
                    join(&o.ranks()),
                    bytes
                )
            }
            TtFile::Block(b) => format!(
                "kind: block train\norder: {}\nmode sizes: {}\nranks: {}\nblock position: {}\nblock size: {}\n",
                b.order(),
                join(&b.mode_sizes()),
                join(&b.ranks()),
                b.block_position(),
                b.block_size()
            ),
        };
        Ok(text)
    }

    fn join(v: &[usize]) -> String {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn round(input: &Path, output: &Path, tol: f64, max_rank: usize) -> Result<()> {
        let t: TTTrain<f64> = ttio::load_train(input)?;
        let rounded = t.round(tol, max_rank)?;
        ttio::save_train(output, &rounded)?;
        Ok(())
    }

    pub fn contract(input: &Path, output: &Path) -> Result<()> {
        let t: TTTrain<f64> = ttio::load_train(input)?;
        let dense = t.contract_full();
        crate::csvio::write_vector(output, &dense.to_vec())?;
        Ok(())
    }

    pub fn convert(input: &Path, sizes: &[usize], tol: f64, output: &Path) -> Result<()> {
        let values = crate::csvio::read_vector(input)?;
        let dense = DenseTensor::from_vec(sizes, values)?;
        let train = TTTrain::tt_svd(&dense, tol, usize::MAX)?;
        ttio::save_train(output, &train)?;
        Ok(())
    }
}

/// Deterministic output helper shared by tests: runs a named task.
pub fn run_task(task: &str, cfg: &SolverTaskConfig, out_dir: &Path) -> Result<TaskOutcome> {
    std::fs::create_dir_all(out_dir)?;
    match task {
        "solve" => run_solve(cfg, out_dir),
        "eig" => run_eig(cfg, out_dir),
        "complete" => run_complete(cfg, out_dir),
        "regress" => run_regress(cfg, out_dir),
        other => Err(CliError::Config(format!("unknown task {other:?}"))),
    }
}

/// Scratch directory helper for tests.
pub fn temp_out_dir(tag: &str) -> PathBuf {
    let mut rng = SplitMix64::new(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0),
    );
    let dir = std::env::temp_dir().join(format!("ttkit_{tag}_{}", rng.next_u64()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

