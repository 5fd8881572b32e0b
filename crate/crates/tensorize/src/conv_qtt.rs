//! Quantized TT representation of the convolution tensor.
//!
//! The zero-padded convolution tensor of order `N + 1` and size
//! `I × ⋯ × I × (N·I)` with `I = 2^D` maps a generating vector to the
//! `N`th-order Toeplitz tensor via contraction over its last mode. It admits
//! an exact QTT form with one core per quantization level, all expressed
//! through a single elementary core tensor `S` of size
//! `N × 2^{N+1} × N`, plus an `N × N` backward-identity core at the end.
//!
//! Index conventions (zero-based throughout):
//! - level `d = 1` carries the least significant bit of every mode:
//!   `i_m = Σ_d j_m^{(d)}·2^{d−1}`;
//! - the final `N`-ary digit `q` of the long mode is the most significant:
//!   `i_{N+1} = q·2^D + Σ_d j^{(d)}·2^{d−1}`;
//! - within a level, the `N + 1` bits merge column-major
//!   (`j₁` fastest): `k = Σ_m j_m·2^{m−1}`.

use crate::error::{Result, TensorizeError};
use ttkit_core::{DenseTensor, Scalar, TTTrain};
use ndarray::Array3;

/// QTT form of the zero-padded convolution tensor.
#[derive(Clone, Debug)]
pub struct ConvTensorQTT<T> {
    order_n: usize,
    depth: usize,
    train: TTTrain<T>,
}

impl<T: Scalar> ConvTensorQTT<T> {
    /// Toeplitz order `N` (number of contracted input vectors).
    pub fn order_n(&self) -> usize {
        self.order_n
    }

    /// Quantization depth `D` (`I = 2^D`).
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The underlying train: `D` cores with one merged mode of size
    /// `2^{N+1}` each, then the final mode of size `N`.
    pub fn train(&self) -> &TTTrain<T> {
        &self.train
    }
}

/// Elementary core tensor `S`, shaped `[N, 2, …, 2, N]` with `N + 1` binary
/// modes, assembled from the `2N` sparse location tensors by the sub-tensor
/// shifting recursion.
pub fn elementary_core_tensor<T: Scalar>(n: usize) -> Result<DenseTensor<T>> {
    if !(2..=17).contains(&n) {
        return Err(TensorizeError::InvalidArgument(format!(
            "Toeplitz order {n} outside the supported range 2..=17"
        )));
    }
    // S_k for k = 1..2N: order-N binary tensors with ones where (one-based)
    // ī₁ + … + ī_{N−1} + i_N equals max(N−k+1, 0) for odd k and
    // max(N−k+3, 0) for even k.
    let bits = 1usize << n;
    let s_parts: Vec<Vec<T>> = (1..=2 * n)
        .map(|k| {
            let target = if k % 2 == 1 {
                n as isize - k as isize + 1
            } else {
                n as isize - k as isize + 3
            }
            .max(0);
            let mut part = vec![T::zero(); bits];
            for flat in 0..bits {
                // zero-based bits b_m = i_m − 1
                let mut lhs = 0isize;
                for m in 0..n {
                    let b = ((flat >> m) & 1) as isize;
                    if m < n - 1 {
                        lhs += 1 - b; // ī = 2 − i, one-based
                    } else {
                        lhs += b + 1; // i_N, one-based
                    }
                }
                if lhs == target {
                    part[flat] = T::one();
                }
            }
            part
        })
        .collect();

    let mut sizes = vec![n];
    sizes.extend(std::iter::repeat(2).take(n + 1));
    sizes.push(n);
    let mut s = DenseTensor::<T>::zeros(&sizes);

    // first layer: S(1, …, j_{N+1}, k) = S_{2k−1} or S_{2k}.
    let mut idx = vec![0usize; n + 3];
    for k in 0..n {
        for flat in 0..bits {
            for m in 0..n {
                idx[1 + m] = (flat >> m) & 1;
            }
            idx[0] = 0;
            idx[n + 2] = k;
            idx[n + 1] = 0;
            s.set(&idx, s_parts[2 * k][flat]);
            idx[n + 1] = 1;
            s.set(&idx, s_parts[2 * k + 1][flat]);
        }
    }
    // recursion over the first index.
    for m_level in 1..n {
        for k in 0..n {
            for flat in 0..bits {
                for m in 0..n {
                    idx[1 + m] = (flat >> m) & 1;
                }
                // S(m, …, 0, k) = S(m−1, …, 1, k)
                idx[0] = m_level - 1;
                idx[n + 1] = 1;
                idx[n + 2] = k;
                let v0 = s.get(&idx);
                idx[0] = m_level;
                idx[n + 1] = 0;
                s.set(&idx, v0);
                // S(m, …, 1, k) = S(m−1, …, 0, k−1), wrapping k = 0 to N−1
                idx[0] = m_level - 1;
                idx[n + 1] = 0;
                idx[n + 2] = if k == 0 { n - 1 } else { k - 1 };
                let v1 = s.get(&idx);
                idx[0] = m_level;
                idx[n + 1] = 1;
                idx[n + 2] = k;
                s.set(&idx, v1);
            }
        }
    }
    Ok(s)
}

/// Builds the QTT representation of the zero-padded convolution tensor for
/// Toeplitz order `n` in `2..=17` and depth `d ≥ 1`.
pub fn convolution_tensor_qtt<T: Scalar>(n: usize, d: usize) -> Result<ConvTensorQTT<T>> {
    if d == 0 {
        return Err(TensorizeError::InvalidArgument("depth must be at least 1".into()));
    }
    let s = elementary_core_tensor::<T>(n)?;
    let merged = 1usize << (n + 1);
    let mut sidx = vec![0usize; n + 3];
    let mut level_core = Array3::<T>::zeros((n, merged, n));
    for a in 0..n {
        for k in 0..merged {
            for m in 0..n + 1 {
                sidx[1 + m] = (k >> m) & 1;
            }
            sidx[0] = a;
            for b in 0..n {
                sidx[n + 2] = b;
                level_core[[a, k, b]] = s.get(&sidx);
            }
        }
    }
    let first_core = {
        let mut c = Array3::<T>::zeros((1, merged, n));
        for k in 0..merged {
            for b in 0..n {
                c[[0, k, b]] = level_core[[0, k, b]];
            }
        }
        c
    };
    // backward identity on the N-ary digit
    let mut exchange = Array3::<T>::zeros((n, n, 1));
    for r in 0..n {
        exchange[[r, n - 1 - r, 0]] = T::one();
    }
    let mut cores = Vec::with_capacity(d + 1);
    cores.push(first_core);
    for _ in 1..d {
        cores.push(level_core.clone());
    }
    cores.push(exchange);
    Ok(ConvTensorQTT { order_n: n, depth: d, train: TTTrain::new(cores)? })
}

/// Dense zero-padded convolution tensor of order `n + 1` and size
/// `[I, …, I, n·I]`: ones where (one-based) `Σ īₖ + i_N + n − 1 = i_{N+1}`.
pub fn convolution_tensor_dense<T: Scalar>(n: usize, i_size: usize) -> DenseTensor<T> {
    let mut sizes = vec![i_size; n];
    sizes.push(n * i_size);
    let mut out = DenseTensor::zeros(&sizes);
    let total: usize = sizes.iter().product();
    let mut idx = vec![0usize; n + 1];
    for flat in 0..total {
        let mut rem = flat;
        for (k, &sz) in sizes.iter().enumerate() {
            idx[k] = rem % sz;
            rem /= sz;
        }
        let mut lhs = idx[n - 1] + n - 1;
        for k in 0..n - 1 {
            lhs += i_size - 1 - idx[k];
        }
        if lhs == idx[n] {
            out.set(&idx, T::one());
        }
    }
    out
}

/// Quantizes a generating vector of length `n·2^d` into the QTT layout the
/// convolution contraction expects: modes `[2; d]` (least significant bit
/// first) followed by the `n`-ary digit.
pub fn generator_to_qtt<T: Scalar>(
    y: &[T],
    n: usize,
    d: usize,
    tol: T,
    max_rank: usize,
) -> Result<TTTrain<T>> {
    let len = n << d;
    if y.len() != len {
        return Err(TensorizeError::SizeMismatch(format!(
            "generator length {} but n·2^d = {}",
            y.len(),
            len
        )));
    }
    let mut sizes = vec![2usize; d];
    sizes.push(n);
    let total = len;
    let mut values = vec![T::zero(); total];
    let mut idx = vec![0usize; d + 1];
    for (flat, value) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for (k, &sz) in sizes.iter().enumerate() {
            idx[k] = rem % sz;
            rem /= sz;
        }
        let mut pos = idx[d] << d; // q · 2^D
        for (lvl, &bit) in idx[..d].iter().enumerate() {
            pos += bit << lvl;
        }
        *value = y[pos];
    }
    let dense = DenseTensor::from_vec(&sizes, values)?;
    Ok(TTTrain::tt_svd(&dense, tol, max_rank)?)
}

/// Contracts the convolution tensor with a quantized generator, producing
/// the QTT Toeplitz tensor: `d` cores, one merged mode of size `2^n` per
/// level (bit of mode `m` at weight `2^{m−1}` within a level; level 1 is the
/// least significant bit of every Toeplitz mode).
pub fn toeplitz_from_qtt<T: Scalar>(
    conv: &ConvTensorQTT<T>,
    y_tt: &TTTrain<T>,
) -> Result<TTTrain<T>> {
    let n = conv.order_n;
    let d = conv.depth;
    let mut expected = vec![2usize; d];
    expected.push(n);
    if y_tt.mode_sizes() != expected {
        return Err(TensorizeError::SizeMismatch(format!(
            "generator train modes {:?}, expected {:?}",
            y_tt.mode_sizes(),
            expected
        )));
    }
    let half = 1usize << n;
    let mut cores: Vec<Array3<T>> = Vec::with_capacity(d);
    for lvl in 0..d {
        let c = conv.train.core(lvl);
        let yv = y_tt.core(lvl);
        let (rl, _, rr) = c.dim();
        let (sl, _, sr) = yv.dim();
        let mut out = Array3::<T>::zeros((rl * sl, half, rr * sr));
        for a in 0..rl {
            for cc in 0..sl {
                for m in 0..half {
                    for b in 0..rr {
                        for dd in 0..sr {
                            let mut acc = T::zero();
                            for j in 0..2usize {
                                acc = acc + c[[a, m + half * j, b]] * yv[[cc, j, dd]];
                            }
                            out[[a * sl + cc, m, b * sr + dd]] = acc;
                        }
                    }
                }
            }
        }
        cores.push(out);
    }
    // final contraction of the exchange core with the generator's digit core
    let exch = conv.train.core(d);
    let ylast = y_tt.core(d);
    let (rl, nq, _) = exch.dim();
    let (sl, _, _) = ylast.dim();
    let mut fvec = vec![T::zero(); rl * sl];
    for a in 0..rl {
        for cc in 0..sl {
            let mut acc = T::zero();
            for q in 0..nq {
                acc = acc + exch[[a, q, 0]] * ylast[[cc, q, 0]];
            }
            fvec[a * sl + cc] = acc;
        }
    }
    // absorb into the last level core
    let last = cores.pop().expect("at least one level");
    let (rl2, _, rr2) = last.dim();
    let mut absorbed = Array3::<T>::zeros((rl2, half, 1));
    for a in 0..rl2 {
        for m in 0..half {
            let mut acc = T::zero();
            for (b, &f) in fvec.iter().enumerate().take(rr2) {
                acc = acc + last[[a, m, b]] * f;
            }
            absorbed[[a, m, 0]] = acc;
        }
    }
    cores.push(absorbed);
    Ok(TTTrain::new(cores)?)
}
