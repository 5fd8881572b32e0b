//! Structural identities: convolution through Toeplitz/Hankel contraction,
//! recursive generation, Hadamard closure, QTT ranks of the convolution
//! tensor, and low-rank facts for structured signals.

use ndarray::Array1;
use ttkit_core::{DenseTensor, SplitMix64, TTTrain};
use ttkit_tensorize::{convolution_tensor_qtt, hankel_tensor, toeplitz_tensor};

fn direct_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[test]
fn toeplitz_contraction_reproduces_convolution() {
    // [x₁∗…∗x_{N−1}∗y] tail segment equals T ×̄₁x₁ ⋯ ×̄_{N−1}x_{N−1}
    let mut rng = SplitMix64::new(42);
    for sizes in [vec![3usize, 4, 6], vec![2, 3, 2, 5], vec![4, 6]] {
        let n = sizes.len();
        let gen_len: usize = sizes.iter().sum::<usize>() + 1 - n;
        let y: Vec<f64> = (0..gen_len).map(|_| rng.next_normal()).collect();
        let xs: Vec<Vec<f64>> = sizes[..n - 1]
            .iter()
            .map(|&s| (0..s).map(|_| rng.next_normal()).collect())
            .collect();
        let t = toeplitz_tensor(&y, &sizes).unwrap();
        let mut contracted = t.clone();
        for x in &xs {
            let v = Array1::from(x.clone());
            contracted = contracted.vec_product(&v, 0).unwrap();
        }
        // direct convolution; the identity covers entries J+1..L (one-based)
        // where J = Σ_{n<N}(Iₙ − 1)
        let mut conv = y.clone();
        for x in &xs {
            conv = direct_convolution(x, &conv);
        }
        let j_off: usize = sizes[..n - 1].iter().map(|&s| s - 1).sum();
        let segment = &conv[j_off..j_off + sizes[n - 1]];
        let got = contracted.to_vec();
        for (g, w) in got.iter().zip(segment.iter()) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }
}

#[test]
fn hankel_contraction_uses_reversed_vectors() {
    let mut rng = SplitMix64::new(7);
    let sizes = vec![3usize, 3, 5];
    let gen_len: usize = sizes.iter().sum::<usize>() + 1 - sizes.len();
    let y: Vec<f64> = (0..gen_len).map(|_| rng.next_normal()).collect();
    let xs: Vec<Vec<f64>> = sizes[..2]
        .iter()
        .map(|&s| (0..s).map(|_| rng.next_normal()).collect())
        .collect();
    let h = hankel_tensor(&y, &sizes).unwrap();
    let mut contracted = h.clone();
    for x in &xs {
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        contracted = contracted.vec_product(&Array1::from(rev), 0).unwrap();
    }
    let mut conv = y.clone();
    for x in &xs {
        conv = direct_convolution(x, &conv);
    }
    let j_off: usize = sizes[..2].iter().map(|&s| s - 1).sum();
    let segment = &conv[j_off..j_off + sizes[2]];
    for (g, w) in contracted.to_vec().iter().zip(segment.iter()) {
        assert!((g - w).abs() < 1e-10);
    }
}

#[test]
fn recursive_generation_of_toeplitz_tensors() {
    // The order-N Toeplitz tensor arises from the order-(N−1) one by turning
    // mode-(N−1) fibers into Toeplitz matrices.
    let mut rng = SplitMix64::new(9);
    let sizes = [3usize, 4, 3, 4];
    let gen_len: usize = sizes.iter().sum::<usize>() + 1 - sizes.len();
    let y: Vec<f64> = (0..gen_len).map(|_| rng.next_normal()).collect();
    let t4 = toeplitz_tensor(&y, &sizes).unwrap();
    let reduced = [3usize, 4, 3 + 4 - 1];
    let t3 = toeplitz_tensor(&y, &reduced).unwrap();
    for i in 0..3 {
        for j in 0..4 {
            let fiber: Vec<f64> = (0..reduced[2]).map(|k| t3.get(&[i, j, k])).collect();
            let m = toeplitz_tensor(&fiber, &[3, 4]).unwrap();
            for a in 0..3 {
                for b in 0..4 {
                    assert!((t4.get(&[i, j, a, b]) - m.get(&[a, b])).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn hadamard_property_of_hankel_and_toeplitz() {
    // H(u) ⊛ H(v) = H(u ⊛ v), same for the Toeplitz tensor.
    let mut rng = SplitMix64::new(11);
    let len = 15usize;
    let sizes = vec![5usize, 5, 7];
    let u: Vec<f64> = (0..len).map(|_| rng.next_normal()).collect();
    let v: Vec<f64> = (0..len).map(|_| rng.next_normal()).collect();
    let w: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| a * b).collect();

    let hu = TTTrain::tt_svd(&hankel_tensor(&u, &sizes).unwrap(), 1e-12, usize::MAX).unwrap();
    let hv = TTTrain::tt_svd(&hankel_tensor(&v, &sizes).unwrap(), 1e-12, usize::MAX).unwrap();
    let hw = hankel_tensor(&w, &sizes).unwrap();
    let prod = hu.hadamard(&hv).unwrap().contract_full();
    assert!(prod.rel_err(&hw) < 1e-10);

    let tu = TTTrain::tt_svd(&toeplitz_tensor(&u, &sizes).unwrap(), 1e-12, usize::MAX).unwrap();
    let tv = TTTrain::tt_svd(&toeplitz_tensor(&v, &sizes).unwrap(), 1e-12, usize::MAX).unwrap();
    let tw = toeplitz_tensor(&w, &sizes).unwrap();
    let prod = tu.hadamard(&tv).unwrap().contract_full();
    assert!(prod.rel_err(&tw) < 1e-10);
}

#[test]
fn qtt_convolution_ranks_match_reference_table() {
    // rounded at 1e-10, the interior ranks follow the published sequences
    let expected: [(usize, Vec<usize>); 5] = [
        (2, vec![2, 2, 2, 2, 2, 2]),
        (3, vec![2, 3, 3, 3, 3, 3]),
        (4, vec![3, 4, 4, 4, 4, 4]),
        (5, vec![3, 4, 5, 5, 5, 5]),
        (6, vec![4, 5, 6, 6, 6, 6]),
    ];
    for (n, want) in expected {
        let conv = convolution_tensor_qtt::<f64>(n, 6).unwrap();
        let rounded = conv.train().round(1e-10, usize::MAX).unwrap();
        assert_eq!(rounded.interior_ranks(), want, "order {n}");
    }
}

#[test]
fn structured_rank_facts_for_signals() {
    // third-order Hankel tensors: sin(ωt) has TT ranks ≤ 3 with rank-3
    // multilinear structure; t has rank 2; t·sin(ωt) at most 6.
    let omega = 0.8_f64;
    let len = 19usize;
    let sizes = vec![7usize, 7, 7];
    let tvals: Vec<f64> = (1..=len).map(|t| t as f64).collect();
    let svals: Vec<f64> = (1..=len).map(|t| (omega * t as f64).sin()).collect();
    let tsin: Vec<f64> = tvals.iter().zip(svals.iter()).map(|(a, b)| a * b).collect();

    let rk = |v: &[f64]| -> Vec<usize> {
        let h = hankel_tensor(v, &sizes).unwrap();
        TTTrain::tt_svd(&h, 1e-8, usize::MAX).unwrap().interior_ranks()
    };
    let r_sin = rk(&svals);
    assert!(r_sin.iter().all(|&r| r <= 3), "sin ranks {r_sin:?}");
    assert!(r_sin.iter().any(|&r| r == 3) || r_sin.iter().all(|&r| r == 2));
    let r_t = rk(&tvals);
    assert!(r_t.iter().all(|&r| r == 2), "ramp ranks {r_t:?}");
    let r_both = rk(&tsin);
    assert!(r_both.iter().all(|&r| r <= 6), "t·sin ranks {r_both:?}");
}

#[test]
fn vandermonde_structure_of_hankel_tensor() {
    // A Hankel tensor of Σ λ_r v_rᵗ admits the symmetric Vandermonde form;
    // verified numerically by reconstructing from the generating nodes.
    let nodes = [0.9_f64, -0.6, 0.3];
    let lambda = [1.0_f64, 0.5, -2.0];
    let len = 10usize;
    let y: Vec<f64> = (0..len)
        .map(|k| {
            nodes
                .iter()
                .zip(lambda.iter())
                .map(|(&v, &l)| l * v.powi(k as i32))
                .sum()
        })
        .collect();
    let sizes = vec![4usize, 4, 4];
    let h = hankel_tensor(&y, &sizes).unwrap();
    let mut rebuilt = DenseTensor::<f64>::zeros(&sizes);
    for (r, (&v, &l)) in nodes.iter().zip(lambda.iter()).enumerate() {
        let _ = r;
        let f: Vec<f64> = (0..4).map(|k| v.powi(k as i32)).collect();
        let fa = Array1::from(f);
        let rank1 = TTTrain::from_rank_one(&[fa.clone(), fa.clone(), fa]).unwrap();
        rebuilt = rebuilt.add(&rank1.scale(l).contract_full()).unwrap();
    }
    assert!(h.rel_err(&rebuilt) < 1e-10);
    // CP/TT rank of the Hankel tensor is bounded by the node count
    let ranks = TTTrain::tt_svd(&h, 1e-10, usize::MAX).unwrap().interior_ranks();
    assert!(ranks.iter().all(|&r| r <= 3), "{ranks:?}");
}
