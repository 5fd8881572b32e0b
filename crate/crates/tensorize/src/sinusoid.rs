//! Closed-form rank-2 TT representations of a sinusoid `sin(ωt + φ)`,
//! `t = 1, …, L`, under three quantized tensorizations: plain folding, the
//! Toeplitz tensor and the Hankel tensor. No SVD is involved; all cores are
//! trigonometric expressions.

use crate::error::{Result, TensorizeError};
use ttkit_core::{Scalar, TTTrain};
use ndarray::Array3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinusoidKind {
    /// `D`-mode folding of the `2^D` samples.
    Folded,
    /// Quantized Toeplitz tensor of the length-`2^D` sample vector
    /// (order `2^D − 1`, all modes of size two).
    Toeplitz,
    /// Quantized Hankel tensor of the sample vector.
    Hankel,
}

/// A sinusoid train together with its construction parameters.
#[derive(Clone, Debug)]
pub struct SinusoidTT<T> {
    pub kind: SinusoidKind,
    pub omega: T,
    pub phase: T,
    pub length: usize,
    pub train: TTTrain<T>,
}

/// Samples `sin(ω t + φ)` for `t = 1, …, len`.
pub fn sinusoid_samples<T: Scalar>(omega: T, phase: T, len: usize) -> Vec<T> {
    (1..=len)
        .map(|t| (omega * T::from_f64_c(t as f64) + phase).sin())
        .collect()
}

/// Builds the closed-form train for `sin(ωt + φ)` with `L = 2^depth`.
///
/// Frequencies with `sin ω = 0` are rejected: the sinusoid degenerates and
/// the rank-2 construction loses meaning.
pub fn sinusoid_tt<T: Scalar>(
    kind: SinusoidKind,
    omega: T,
    phase: T,
    depth: usize,
) -> Result<SinusoidTT<T>> {
    if depth < 2 {
        return Err(TensorizeError::InvalidArgument("depth must be at least 2".into()));
    }
    if omega.sin().abs() < T::from_f64_c(1e-12) {
        return Err(TensorizeError::InvalidArgument(
            "sin(omega) vanishes; the rank-2 construction degenerates".into(),
        ));
    }
    let length = 1usize << depth;
    let train = match kind {
        SinusoidKind::Folded => folded_train(omega, phase, depth)?,
        SinusoidKind::Toeplitz => toeplitz_train(omega, phase, length)?,
        SinusoidKind::Hankel => hankel_train(omega, phase, length)?,
    };
    Ok(SinusoidTT { kind, omega, phase, length, train })
}

/// Harmonic matrix `U_{ω,I}` rows `[cos(kω), sin(kω)]`, `k = 0, …, I−1`.
fn harmonic_rows<T: Scalar>(omega: T, i_size: usize) -> Vec<[T; 2]> {
    (0..i_size)
        .map(|k| {
            let a = omega * T::from_f64_c(k as f64);
            [a.cos(), a.sin()]
        })
        .collect()
}

fn folded_train<T: Scalar>(omega: T, phase: T, depth: usize) -> Result<TTTrain<T>> {
    // sample t = 1 + Σ iₙ·2^{n−1}: phase φ' = φ + ω absorbs the offset
    let phi = phase + omega;
    let n = depth;
    // phase-pair core algebra: state [cos Θ, sin Θ], each mode rotates by
    // ωₙ·iₙ with ωₙ = 2^{n−1}·ω
    let two = T::from_f64_c(2.0);
    let mut cores = Vec::with_capacity(n);
    for level in 0..n {
        let w = omega * two.powi(level as i32);
        let u = harmonic_rows(w, 2);
        let core = if level == 0 {
            // [cos(φ' + w·i), sin(φ' + w·i)]
            let mut c = Array3::<T>::zeros((1, 2, 2));
            for (i, row) in u.iter().enumerate() {
                let (cw, sw) = (row[0], row[1]);
                c[[0, i, 0]] = phi.cos() * cw - phi.sin() * sw;
                c[[0, i, 1]] = phi.sin() * cw + phi.cos() * sw;
            }
            c
        } else if level < n - 1 {
            // rotation acting on row vectors: [[c, s], [−s, c]]
            let mut c = Array3::<T>::zeros((2, 2, 2));
            for (i, row) in u.iter().enumerate() {
                let (cw, sw) = (row[0], row[1]);
                c[[0, i, 0]] = cw;
                c[[0, i, 1]] = sw;
                c[[1, i, 0]] = -sw;
                c[[1, i, 1]] = cw;
            }
            c
        } else {
            // read out sin(Θ + w·i): [cos Θ, sin Θ]·[sin(w i), cos(w i)]ᵀ
            let mut c = Array3::<T>::zeros((2, 2, 1));
            for (i, row) in u.iter().enumerate() {
                let (cw, sw) = (row[0], row[1]);
                c[[0, i, 0]] = sw;
                c[[1, i, 0]] = cw;
            }
            c
        };
        cores.push(core);
    }
    Ok(TTTrain::new(cores)?)
}

fn quantized_chain<T: Scalar>(
    g_slice0: [[T; 2]; 2],
    g_slice1: [[T; 2]; 2],
    last: [[T; 2]; 2],
    order: usize,
) -> Result<TTTrain<T>> {
    let mut cores = Vec::with_capacity(order);
    // first core: identity pass-through of the first index
    let mut first = Array3::<T>::zeros((1, 2, 2));
    first[[0, 0, 0]] = T::one();
    first[[0, 1, 1]] = T::one();
    cores.push(first);
    for _ in 1..order - 1 {
        let mut g = Array3::<T>::zeros((2, 2, 2));
        for a in 0..2 {
            for b in 0..2 {
                g[[a, 0, b]] = g_slice0[a][b];
                g[[a, 1, b]] = g_slice1[a][b];
            }
        }
        cores.push(g);
    }
    let mut a_core = Array3::<T>::zeros((2, 2, 1));
    for a in 0..2 {
        for i in 0..2 {
            a_core[[a, i, 0]] = last[a][i];
        }
    }
    cores.push(a_core);
    Ok(TTTrain::new(cores)?)
}

fn toeplitz_train<T: Scalar>(omega: T, phase: T, length: usize) -> Result<TTTrain<T>> {
    let y = sinusoid_samples(omega, phase, length);
    let order = length - 1;
    let two_cos = T::from_f64_c(2.0) * omega.cos();
    // slice i = 1 is the identity, slice i = 2 the three-term recursion
    quantized_chain(
        [[T::one(), T::zero()], [T::zero(), T::one()]],
        [[T::zero(), T::one()], [-T::one(), two_cos]],
        [
            [y[length - 2], y[length - 1]],
            [y[length - 3], y[length - 2]],
        ],
        order,
    )
}

fn hankel_train<T: Scalar>(omega: T, phase: T, length: usize) -> Result<TTTrain<T>> {
    let y = sinusoid_samples(omega, phase, length);
    let order = length - 1;
    let two_cos = T::from_f64_c(2.0) * omega.cos();
    quantized_chain(
        [[two_cos, -T::one()], [T::one(), T::zero()]],
        [[T::one(), T::zero()], [T::zero(), T::one()]],
        [
            [y[length - 3], y[length - 2]],
            [y[length - 2], y[length - 1]],
        ],
        order,
    )
}
