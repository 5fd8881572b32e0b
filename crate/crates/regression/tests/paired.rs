//! Paired-run comparisons between the regression variants.

use ndarray::{Array1, Array2};
use ttkit_core::{DenseTensor, SplitMix64};
use ttkit_regression::{holrr_fit, kholrr_fit, kernel_matrix, KernelConfig};

/// On a nonlinear synthetic map the RBF-kernel model must beat the linear
/// one by at least a factor of two in held-out RMSE.
#[test]
fn rbf_kernel_beats_linear_on_nonlinear_map() {
    let mut rng = SplitMix64::new(42);
    let m = 80;
    let i0 = 2;
    let truth = |x: &Array1<f64>| -> [f64; 2] {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        [(3.0 * r).sin(), (2.0 * x[0]).cos() * x[1]]
    };
    let x: Array2<f64> = rng.normal_mat(m, i0);
    let mut y = DenseTensor::<f64>::zeros(&[m, 2]);
    for s in 0..m {
        let row = x.row(s).to_owned();
        let t = truth(&row);
        y.set(&[s, 0], t[0]);
        y.set(&[s, 1], t[1]);
    }
    let gamma = 1e-3;
    let linear = holrr_fit(&x, &y, &[2, 2], gamma).unwrap();

    let beta = 1.0;
    let tensors: Vec<DenseTensor<f64>> = (0..m)
        .map(|s| DenseTensor::from_vec(&[i0], x.row(s).to_vec()).unwrap())
        .collect();
    let gram = kernel_matrix(&tensors, &KernelConfig::GaussianRbf { beta }).unwrap();
    let rbf = kholrr_fit(&gram, &y, &[20, 2], gamma).unwrap();

    let mut rmse_lin = 0.0;
    let mut rmse_rbf = 0.0;
    let n_test = 60;
    for _ in 0..n_test {
        let xs: Array1<f64> = rng.normal_vec(i0);
        let t = truth(&xs);
        let pl = linear.predict(&xs).unwrap();
        let xt = DenseTensor::from_vec(&[i0], xs.to_vec()).unwrap();
        let mut kx = Array1::<f64>::zeros(m);
        for (s, ts) in tensors.iter().enumerate() {
            kx[s] =
                ttkit_regression::kernel_value(&xt, ts, &KernelConfig::GaussianRbf { beta })
                    .unwrap();
        }
        let pr = rbf.predict(&kx).unwrap();
        for j in 0..2 {
            rmse_lin += (pl.get(&[j]) - t[j]).powi(2);
            rmse_rbf += (pr.get(&[j]) - t[j]).powi(2);
        }
    }
    rmse_lin = (rmse_lin / (2.0 * n_test as f64)).sqrt();
    rmse_rbf = (rmse_rbf / (2.0 * n_test as f64)).sqrt();
    assert!(
        rmse_rbf * 2.0 <= rmse_lin,
        "rbf {rmse_rbf} vs linear {rmse_lin}"
    );
}

/// Identity Gram: training predictions are the per-sample projections of Y
/// onto the response subspaces.
#[test]
fn identity_gram_projects_responses() {
    let y = DenseTensor::<f64>::random_normal(&[10, 3, 2], 7);
    let k = Array2::<f64>::eye(10);
    // the sample-mode pencil has rank 6 (= ΠJ), the largest usable R₀
    let model = kholrr_fit(&k, &y, &[6, 3, 2], 0.0).unwrap();
    for s in 0..10 {
        let mut ks = Array1::<f64>::zeros(10);
        ks[s] = 1.0;
        let pred = model.predict(&ks).unwrap();
        let mut want = DenseTensor::<f64>::zeros(&[3, 2]);
        for a in 0..3 {
            for b in 0..2 {
                want.set(&[a, b], y.get(&[s, a, b]));
            }
        }
        assert!(pred.rel_err(&want) < 1e-8, "sample {s}: {}", pred.rel_err(&want));
    }
}
