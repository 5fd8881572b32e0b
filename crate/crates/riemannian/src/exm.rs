//! Exponential machines: a predictor `ŷ(x) = ⟨W, Z(x)⟩` where `Z(x)` is the
//! rank-one tensor of all multiplicative feature interactions
//! (`[1, xₙ]` per mode) and the weight tensor `W` lives on a fixed-rank TT
//! manifold, trained by stochastic Riemannian gradient descent with
//! backtracking.

use crate::error::{Result, RiemannianError};
use crate::tangent::{retract, TangentSpace, TangentVector};
use ndarray::{Array1, Array2};
use serde::Serialize;
use ttkit_core::{Scalar, SplitMix64, TTTrain};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExmLoss {
    Squared,
    Logistic,
}

#[derive(Clone, Debug)]
pub struct ExmConfig {
    /// Interior TT rank of the weight tensor (uniform).
    pub rank: usize,
    /// Outer iterations.
    pub iters: usize,
    /// Minibatch size (clamped to the dataset size).
    pub minibatch: usize,
    pub loss: ExmLoss,
    /// Ridge weight λ on `‖W‖²_F`.
    pub lambda: f64,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    /// Backtracking shrink factor.
    pub rho: f64,
    pub seed: u64,
    /// Scale of the rank-padding noise added to the linear-fit start.
    pub init_noise: f64,
}

impl Default for ExmConfig {
    fn default() -> Self {
        Self {
            rank: 2,
            iters: 200,
            minibatch: 16,
            loss: ExmLoss::Squared,
            lambda: 0.0,
            c1: 1e-4,
            rho: 0.5,
            seed: 0,
            init_noise: 1e-3,
        }
    }
}

/// One trace record per outer iteration.
#[derive(Clone, Debug, Serialize)]
pub struct ExmTraceEntry {
    pub iter: usize,
    pub loss: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct ExmModel<T> {
    pub weight: TTTrain<T>,
    pub lambda: f64,
    pub loss: ExmLoss,
    pub trace: Vec<ExmTraceEntry>,
}

impl<T: Scalar> ExmModel<T> {
    /// Predicts `⟨W, Z(x)⟩` for a feature vector.
    pub fn predict(&self, x: &Array1<T>) -> Result<T> {
        weight_dot_features(&self.weight, x)
    }

    /// Serializes the training trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|e| serde_json::to_string(e).expect("serializable"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// `⟨W, ∘ₙ [1, xₙ]⟩` without materializing the rank-one tensor.
pub fn weight_dot_features<T: Scalar>(w: &TTTrain<T>, x: &Array1<T>) -> Result<T> {
    if x.len() != w.order() {
        return Err(RiemannianError::ShapeMismatch(format!(
            "feature length {} vs weight order {}",
            x.len(),
            w.order()
        )));
    }
    let mut acc = Array1::<T>::ones(1);
    for (n, core) in w.cores().iter().enumerate() {
        let (r0, i, r1) = core.dim();
        debug_assert_eq!(i, 2);
        let mut next = Array1::<T>::zeros(r1);
        for b in 0..r1 {
            let mut s = T::zero();
            for a in 0..r0 {
                s = s + acc[a] * (core[[a, 0, b]] + core[[a, 1, b]] * x[n]);
            }
            next[b] = s;
        }
        acc = next;
    }
    Ok(acc[0])
}

/// Rank-one interaction train `∘ₙ [1, xₙ]`.
pub fn interaction_train<T: Scalar>(x: &Array1<T>) -> TTTrain<T> {
    let factors: Vec<Array1<T>> = x
        .iter()
        .map(|&v| Array1::from(vec![T::one(), v]))
        .collect();
    TTTrain::from_rank_one(&factors).expect("nonempty features")
}

/// Exact TT representation of the affine model `w₀ + Σ wₙ xₙ` as a weight
/// tensor over the interaction basis (rank two).
fn linear_weight_train<T: Scalar>(w0: T, coeffs: &Array1<T>) -> TTTrain<T> {
    use ndarray::Array3;
    let n = coeffs.len();
    if n == 1 {
        let mut core = Array3::zeros((1, 2, 1));
        core[[0, 0, 0]] = w0;
        core[[0, 1, 0]] = coeffs[0];
        return TTTrain::new(vec![core]).expect("valid");
    }
    let mut cores = Vec::with_capacity(n);
    // states: "no interaction used yet" and "one linear term emitted"
    let mut first = Array3::zeros((1, 2, 2));
    first[[0, 0, 0]] = T::one();
    first[[0, 1, 1]] = coeffs[0];
    cores.push(first);
    for k in 1..n - 1 {
        let mut mid = Array3::zeros((2, 2, 2));
        mid[[0, 0, 0]] = T::one();
        mid[[1, 0, 1]] = T::one();
        mid[[0, 1, 1]] = coeffs[k];
        cores.push(mid);
    }
    let mut last = Array3::zeros((2, 2, 1));
    last[[0, 0, 0]] = w0;
    last[[1, 0, 0]] = T::one();
    last[[0, 1, 0]] = coeffs[n - 1];
    cores.push(last);
    TTTrain::new(cores).expect("valid")
}

fn loss_value<T: Scalar>(kind: ExmLoss, pred: T, target: T) -> T {
    match kind {
        ExmLoss::Squared => {
            let d = pred - target;
            d * d
        }
        ExmLoss::Logistic => (T::one() + (-target * pred).exp()).ln(),
    }
}

fn loss_grad<T: Scalar>(kind: ExmLoss, pred: T, target: T) -> T {
    match kind {
        ExmLoss::Squared => T::from_f64_c(2.0) * (pred - target),
        ExmLoss::Logistic => -target / (T::one() + (target * pred).exp()),
    }
}

/// Full penalized objective `Σₘ l(ŷₘ, yₘ) + λ‖W‖²_F`.
fn penalized_loss<T: Scalar>(
    w: &TTTrain<T>,
    data: &Array2<T>,
    targets: &[T],
    loss: ExmLoss,
    lambda: f64,
) -> Result<T> {
    let mut acc = T::zero();
    for (m, &y) in targets.iter().enumerate() {
        let x = data.row(m).to_owned();
        let pred = weight_dot_features(w, &x)?;
        acc = acc + loss_value(loss, pred, y);
    }
    let wn = w.norm();
    Ok(acc + T::from_f64_c(lambda) * wn * wn)
}

/// Trains an exponential machine on `(data, targets)`; rows of `data` are
/// feature vectors.
pub fn exm_fit<T: Scalar>(
    data: &Array2<T>,
    targets: &[T],
    cfg: &ExmConfig,
) -> Result<ExmModel<T>> {
    let m = data.nrows();
    let n = data.ncols();
    if m == 0 || n == 0 || targets.len() != m {
        return Err(RiemannianError::InvalidArgument(
            "need a nonempty dataset with one target per row".into(),
        ));
    }
    let mut rng = SplitMix64::new(cfg.seed);

    // linear least-squares start: design [1, x₁, …, x_N]
    let mut design = Array2::<T>::ones((m, n + 1));
    for i in 0..m {
        for j in 0..n {
            design[[i, j + 1]] = data[[i, j]];
        }
    }
    let mut yv = Array2::<T>::zeros((m, 1));
    for (i, &t) in targets.iter().enumerate() {
        yv[[i, 0]] = t;
    }
    let sol = ttkit_core::linalg::lstsq(&design.view(), &yv.view())
        .map_err(ttkit_core::CoreError::from)?;
    let w0 = sol[[0, 0]];
    let coeffs = Array1::from_iter((0..n).map(|j| sol[[j + 1, 0]]));
    let lin = linear_weight_train(w0, &coeffs);
    // pad to the requested rank with small seeded noise, keeping the ranks
    // fixed afterwards (manifold constraint)
    let target_ranks: Vec<usize> = {
        let sizes = vec![2usize; n];
        let probe = TTTrain::<T>::random(&sizes, &vec![cfg.rank; n.saturating_sub(1)], 0)?;
        probe.interior_ranks()
    };
    let mut weight = {
        let noise = TTTrain::<T>::random(&vec![2usize; n], &target_ranks, rng.next_u64())?;
        let scaled = noise.scale(T::from_f64_c(cfg.init_noise) / noise.norm().max(T::epsilon()));
        let summed = lin.add(&scaled)?;
        summed.round_with_caps(T::zero(), &target_ranks)?
    };

    let mut trace = Vec::with_capacity(cfg.iters);
    let mut alpha = T::one();
    let batch = cfg.minibatch.clamp(1, m);
    for iter in 0..cfg.iters {
        let space = TangentSpace::at(&weight)?;
        // minibatch gradient, projected term by term (each Z(x) is rank one)
        let mut grad: Option<TangentVector<T>> = None;
        for _ in 0..batch {
            let pick = rng.next_index(m);
            let x = data.row(pick).to_owned();
            let pred = weight_dot_features(&weight, &x)?;
            let gl = loss_grad(cfg.loss, pred, targets[pick]);
            let z = interaction_train(&x);
            let pz = space.project(&z)?.scale(gl);
            grad = Some(match grad {
                Some(g) => g.add(&pz),
                None => pz,
            });
        }
        let mut grad = grad.expect("nonzero batch");
        if cfg.lambda > 0.0 {
            let pw = space.project(&space.base())?;
            grad = grad.add(&pw.scale(T::from_f64_c(2.0 * cfg.lambda)));
        }
        let gnorm_sq = grad.dot(&grad);
        if gnorm_sq == T::zero() {
            trace.push(ExmTraceEntry {
                iter,
                loss: penalized_loss(&weight, data, targets, cfg.loss, cfg.lambda)?
                    .to_f64()
                    .unwrap_or(f64::NAN),
                step: 0.0,
            });
            continue;
        }
        let j_cur = penalized_loss(&weight, data, targets, cfg.loss, cfg.lambda)?;
        let c1 = T::from_f64_c(cfg.c1);
        let rho = T::from_f64_c(cfg.rho);
        let mut step = alpha;
        let mut accepted = false;
        for _ in 0..50 {
            let cand = retract(&space, &grad, -step)?;
            let j_cand = penalized_loss(&cand, data, targets, cfg.loss, cfg.lambda)?;
            if j_cur - j_cand >= c1 * step * gnorm_sq {
                weight = cand;
                alpha = step * T::from_f64_c(2.0);
                trace.push(ExmTraceEntry {
                    iter,
                    loss: j_cand.to_f64().unwrap_or(f64::NAN),
                    step: step.to_f64().unwrap_or(f64::NAN),
                });
                accepted = true;
                break;
            }
            step = step * rho;
        }
        if !accepted {
            trace.push(ExmTraceEntry {
                iter,
                loss: j_cur.to_f64().unwrap_or(f64::NAN),
                step: 0.0,
            });
            alpha = T::one();
        }
    }
    Ok(ExmModel { weight, lambda: cfg.lambda, loss: cfg.loss, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interaction_train_evaluates_products() {
        let x = Array1::from(vec![2.0_f64, -1.0, 0.5]);
        let z = interaction_train(&x);
        // entry (1, 1, 0) = x₁·x₂·1
        assert!((z.eval_at(&[1, 1, 0]).unwrap() - 2.0 * -1.0).abs() < 1e-14);
        assert!((z.eval_at(&[0, 0, 0]).unwrap() - 1.0).abs() < 1e-14);
        assert!((z.eval_at(&[1, 1, 1]).unwrap() - 2.0 * -1.0 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn linear_start_reproduces_affine_function() {
        let coeffs = Array1::from(vec![0.5_f64, -1.5, 2.0, 0.25]);
        let w = linear_weight_train(0.7, &coeffs);
        let x = Array1::from(vec![1.0_f64, 2.0, -1.0, 3.0]);
        let pred = weight_dot_features(&w, &x).unwrap();
        let want = 0.7 + coeffs.dot(&x);
        assert!((pred - want).abs() < 1e-12);
        assert!(w.interior_ranks().iter().all(|&r| r <= 2));
    }

    #[test]
    fn xor_interaction_is_learnt_exactly() {
        // y = x₁·x₂ over {−1, 1}²: a pure interaction term the model
        // represents exactly at rank 2
        let data = Array2::from_shape_vec(
            (4, 2),
            vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
        )
        .unwrap();
        let targets: Vec<f64> = (0..4).map(|i| data[[i, 0]] * data[[i, 1]]).collect();
        let cfg = ExmConfig {
            rank: 2,
            iters: 300,
            minibatch: 4,
            lambda: 0.0,
            ..Default::default()
        };
        let model = exm_fit(&data, &targets, &cfg).unwrap();
        let final_loss = model.trace.last().unwrap().loss;
        assert!(final_loss <= 1e-6, "final loss {final_loss}");
        for i in 0..4 {
            let pred = model.predict(&data.row(i).to_owned()).unwrap();
            assert!((pred - targets[i]).abs() < 1e-3, "sample {i}: {pred}");
        }
    }

    #[test]
    fn huge_ridge_collapses_weights() {
        let data = Array2::from_shape_vec(
            (4, 2),
            vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
        )
        .unwrap();
        let targets = vec![1.0_f64, -1.0, -1.0, 1.0];
        let cfg = ExmConfig { rank: 2, iters: 200, minibatch: 4, lambda: 1e8, ..Default::default() };
        let model = exm_fit(&data, &targets, &cfg).unwrap();
        assert!(model.weight.norm() < 1e-3, "‖W‖ = {}", model.weight.norm());
    }

    #[test]
    fn average_loss_decreases_on_planted_interactions() {
        // N = 10 sparse-interaction model with noise; stochastic training
        // must reduce the penalized loss on average
        let mut rng = SplitMix64::new(33);
        let n = 10;
        let m = 400;
        let mut data = Array2::<f64>::zeros((m, n));
        for v in data.iter_mut() {
            *v = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
        }
        let sigma = 0.05;
        let targets: Vec<f64> = (0..m)
            .map(|i| {
                0.8 * data[[i, 0]] * data[[i, 3]] - 1.2 * data[[i, 5]]
                    + 0.5 * data[[i, 7]] * data[[i, 8]]
                    + sigma * rng.next_normal()
            })
            .collect();
        let cfg = ExmConfig {
            rank: 3,
            iters: 600,
            minibatch: 16,
            lambda: 1e-6,
            seed: 1,
            ..Default::default()
        };
        let model = exm_fit(&data, &targets, &cfg).unwrap();
        let first: f64 = model.trace[..20].iter().map(|e| e.loss).sum::<f64>() / 20.0;
        let last: f64 =
            model.trace[model.trace.len() - 20..].iter().map(|e| e.loss).sum::<f64>() / 20.0;
        assert!(last < first, "trailing mean {last} vs leading {first}");
        // held-out RMSE within twice the noise level
        let mut sse = 0.0;
        let n_test = 100;
        for _ in 0..n_test {
            let x = Array1::from_iter(
                (0..n).map(|_| if rng.next_f64() < 0.5 { 1.0 } else { -1.0 }),
            );
            let truth = 0.8 * x[0] * x[3] - 1.2 * x[5] + 0.5 * x[7] * x[8];
            let pred = model.predict(&x).unwrap();
            sse += (pred - truth) * (pred - truth);
        }
        let rmse = (sse / n_test as f64).sqrt();
        assert!(rmse <= 2.0 * sigma + 0.05, "test rmse {rmse}");
    }

    #[test]
    fn full_rank_full_batch_tracks_euclidean_descent() {
        // with maximal ranks the manifold is the whole space, so the
        // trajectory must match plain gradient descent with the same rule;
        // the data keeps all ten steps away from stationarity so both paths
        // take the same branch decisions with healthy margins
        let mut seed_rng = SplitMix64::new(77);
        let m = 16;
        let mut data = Array2::<f64>::zeros((m, 2));
        for v in data.iter_mut() {
            *v = 2.0 * seed_rng.next_f64() - 1.0;
        }
        let targets: Vec<f64> = (0..m)
            .map(|i| {
                (2.0 * data[[i, 0]]).sin() + data[[i, 1]].powi(3)
                    + 0.2 * seed_rng.next_normal()
            })
            .collect();
        let cfg = ExmConfig {
            rank: 4, // clamps to the full rank 2 for 2×2 weight tensors
            iters: 10,
            minibatch: m,
            lambda: 0.0,
            seed: 3,
            init_noise: 0.0,
            ..Default::default()
        };
        let model = exm_fit(&data, &targets, &cfg).unwrap();
        // the dense twin replays the same minibatch picks via the same rng
        let mut rng = SplitMix64::new(cfg.seed);
        let lin = {
            let mut design = Array2::<f64>::ones((m, 3));
            for i in 0..m {
                design[[i, 1]] = data[[i, 0]];
                design[[i, 2]] = data[[i, 1]];
            }
            let mut yv = Array2::<f64>::zeros((m, 1));
            for (i, &t) in targets.iter().enumerate() {
                yv[[i, 0]] = t;
            }
            let sol = ttkit_core::linalg::lstsq(&design.view(), &yv.view()).unwrap();
            (sol[[0, 0]], sol[[1, 0]], sol[[2, 0]])
        };
        // dense weight tensor over the interaction basis (2×2)
        let mut w = [[lin.0, lin.2], [lin.1, 0.0]];
        let _ = rng.next_u64(); // padding-noise draw consumed by exm_fit
        let pred = |w: &[[f64; 2]; 2], x: &[f64; 2]| -> f64 {
            w[0][0] + w[1][0] * x[0] + w[0][1] * x[1] + w[1][1] * x[0] * x[1]
        };
        let loss_of = |w: &[[f64; 2]; 2]| -> f64 {
            (0..m)
                .map(|i| {
                    let p = pred(w, &[data[[i, 0]], data[[i, 1]]]);
                    (p - targets[i]).powi(2)
                })
                .sum()
        };
        for it in 0..cfg.iters {
            let mut g = [[0.0f64; 2]; 2];
            for _ in 0..m {
                let pick = rng.next_index(m);
                let x = [data[[pick, 0]], data[[pick, 1]]];
                let gl = 2.0 * (pred(&w, &x) - targets[pick]);
                g[0][0] += gl;
                g[1][0] += gl * x[0];
                g[0][1] += gl * x[1];
                g[1][1] += gl * x[0] * x[1];
            }
            // same step size as the manifold path: at full rank the
            // projection and retraction are identities, so the update must
            // coincide with the plain Euclidean step
            let step = model.trace[it].step;
            for a in 0..2 {
                for b in 0..2 {
                    w[a][b] -= step * g[a][b];
                }
            }
            let model_loss = model.trace[it].loss;
            assert!(
                (model_loss - loss_of(&w)).abs() <= 1e-8 * model_loss.abs().max(1.0),
                "iteration {it}: {model_loss} vs {}",
                loss_of(&w)
            );
        }
    }
}
