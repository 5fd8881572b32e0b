//! Derivative tensors of the second generalized characteristic function
//! (GCF) of multichannel observations, and higher-order cumulants as the
//! special case at the origin.
//!
//! With `φ̂(u) = (1/T) Σ_t exp(uᵀ xₜ)` and raw derivative tensors
//! `ψ⁽ⁿ⁾(u) = (1/T) Σ_t exp(uᵀ xₜ)·xₜ^{∘n}`, the order-`N` derivative of
//! `log φ̂` expands over the integer partitions `n₁ ≤ … ≤ n_k` of `N`:
//!
//! ```text
//! Ψ(u) = Σ_k (−1)^{k−1}(k−1)!/φ̂^k · Σ_partitions m(n₁,…,n_k) ·
//!        S(ψ⁽ⁿ¹⁾ ∘ ⋯ ∘ ψ⁽ⁿᵏ⁾)
//! ```
//!
//! where `m` counts the set partitions with those block sizes and `S`
//! symmetrizes once over all mode permutations. At `u = 0` with centered
//! data every partition containing a singleton block vanishes, which gives
//! the cumulant tensors.

use crate::error::{Result, TensorizeError};
use ndarray::{Array1, ArrayView2};
use ttkit_core::{DenseTensor, Scalar};

/// Highest implemented derivative order.
pub const MAX_ORDER: usize = 8;

/// Symmetric derivative tensor of the second GCF at a processing point.
#[derive(Clone, Debug)]
pub struct GcfDerivativeTensor<T> {
    pub order: usize,
    pub point: Array1<T>,
    pub value: DenseTensor<T>,
}

/// Integer partitions of `n` into parts `≥ min_part`, ascending within each
/// partition.
fn partitions(n: usize, min_part: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in min..=n {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, min_part, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of set partitions of `{1, …, N}` into blocks of the given sizes:
/// `N! / (Π_j (n̄_j!)^{l_j} · l_j!)` over the distinct part sizes `n̄_j`
/// with multiplicities `l_j`.
fn partition_multiplicity(parts: &[usize]) -> f64 {
    let n: usize = parts.iter().sum();
    let mut denom = 1.0;
    let mut k = 0;
    while k < parts.len() {
        let v = parts[k];
        let mut l: i32 = 0;
        while k < parts.len() && parts[k] == v {
            l += 1;
            k += 1;
        }
        denom *= factorial(v).powi(l) * factorial(l as usize);
    }
    factorial(n) / denom
}

/// Raw derivative tensors `ψ⁽¹⁾, …, ψ⁽ᵐᵃˣ⁾` and `φ̂` at `u`.
fn raw_moments<T: Scalar>(
    x: &ArrayView2<T>,
    u: &Array1<T>,
    max_order: usize,
) -> Result<(T, Vec<DenseTensor<T>>)> {
    let (dim, t_len) = x.dim();
    if t_len == 0 {
        return Err(TensorizeError::InvalidArgument("no samples".into()));
    }
    let guard = T::from_f64_c(300.0);
    let dots: Vec<T> = (0..t_len)
        .map(|t| {
            let mut dot = T::zero();
            for i in 0..dim {
                dot = dot + u[i] * x[[i, t]];
            }
            dot
        })
        .collect();
    if dots.iter().any(|w| w.abs() > guard) {
        return Err(TensorizeError::Overflow(
            "|uᵀx| exceeds 300; exp would overflow".into(),
        ));
    }
    let weights: Vec<T> = dots.into_iter().map(|w| w.exp()).collect();
    let inv_t = T::one() / T::from_f64_c(t_len as f64);
    let phi: T = weights.iter().copied().sum::<T>() * inv_t;

    let mut psis = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let sizes = vec![dim; order];
        let total = dim.pow(order as u32);
        let mut vals = vec![T::zero(); total];
        let mut idx = vec![0usize; order];
        for t in 0..t_len {
            let w = weights[t] * inv_t;
            for (flat, slot) in vals.iter_mut().enumerate() {
                let mut rem = flat;
                for slot_idx in idx.iter_mut() {
                    *slot_idx = rem % dim;
                    rem /= dim;
                }
                let mut prod = w;
                for &i in idx.iter() {
                    prod = prod * x[[i, t]];
                }
                *slot = *slot + prod;
            }
        }
        psis.push(DenseTensor::from_vec(&sizes, vals)?);
    }
    Ok((phi, psis))
}

/// Shared expansion: builds the order-`n` derivative tensor from `φ̂` and the
/// raw tensors, restricted to partitions with parts `≥ min_part`.
fn expand<T: Scalar>(
    phi: T,
    psis: &[DenseTensor<T>],
    order: usize,
    min_part: usize,
    dim: usize,
) -> Result<DenseTensor<T>> {
    let mut acc = DenseTensor::<T>::zeros(&vec![dim; order]);
    for parts in partitions(order, min_part) {
        let k = parts.len();
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        let coeff = sign * T::from_f64_c(factorial(k - 1) * partition_multiplicity(&parts))
            / phi.powi(k as i32);
        let mut outer = psis[parts[0] - 1].clone();
        for &p in &parts[1..] {
            outer = outer.outer(&psis[p - 1]);
        }
        acc = acc.add(&outer.scale(coeff))?;
    }
    Ok(acc.symmetrize()?)
}

/// Order-`n` derivative tensor of the second GCF of the observations `x`
/// (rows = channels, columns = samples) at processing point `u`.
///
/// Supported orders are `2..=8`; the expansion is the general partition
/// formula, so the ceiling only bounds cost.
pub fn gcf_derivative<T: Scalar>(
    x: &ArrayView2<T>,
    u: &Array1<T>,
    order: usize,
) -> Result<GcfDerivativeTensor<T>> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(TensorizeError::InvalidArgument(format!(
            "derivative order {order} outside 2..={MAX_ORDER}"
        )));
    }
    let (dim, _) = x.dim();
    if u.len() != dim {
        return Err(TensorizeError::SizeMismatch(format!(
            "processing point length {} vs {} channels",
            u.len(),
            dim
        )));
    }
    let (phi, psis) = raw_moments(x, u, order)?;
    let value = expand(phi, &psis, order, 1, dim)?;
    Ok(GcfDerivativeTensor { order, point: u.clone(), value })
}

/// Order-`n` cumulant tensor of the observations.
///
/// The data is mean-centered internally; with `ψ⁽¹⁾(0) = 0` every partition
/// containing a singleton block drops out of the expansion.
pub fn cumulant<T: Scalar>(x: &ArrayView2<T>, order: usize) -> Result<DenseTensor<T>> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(TensorizeError::InvalidArgument(format!(
            "cumulant order {order} outside 2..={MAX_ORDER}"
        )));
    }
    let (dim, t_len) = x.dim();
    if t_len == 0 {
        return Err(TensorizeError::InvalidArgument("no samples".into()));
    }
    let mut centered = x.to_owned();
    for mut row in centered.rows_mut() {
        let mean = row.iter().copied().sum::<T>() / T::from_f64_c(t_len as f64);
        row.mapv_inplace(|v| v - mean);
    }
    let u = Array1::zeros(dim);
    let (phi, psis) = raw_moments(&centered.view(), &u, order)?;
    expand(phi, &psis, order, 2, dim)
}

/// Stack of derivative tensors at `K` processing points, shaped
/// `I × ⋯ × I × K`. With `subtract_mean` the average derivative tensor is
/// removed from every slice (stationary-noise cancellation).
pub fn derivative_stack<T: Scalar>(
    x: &ArrayView2<T>,
    points: &[Array1<T>],
    order: usize,
    subtract_mean: bool,
) -> Result<DenseTensor<T>> {
    if points.is_empty() {
        return Err(TensorizeError::InvalidArgument("no processing points".into()));
    }
    let (dim, _) = x.dim();
    let k = points.len();
    let mut slices = Vec::with_capacity(k);
    for u in points {
        slices.push(gcf_derivative(x, u, order)?.value);
    }
    if subtract_mean {
        let mut mean = DenseTensor::<T>::zeros(&vec![dim; order]);
        for s in &slices {
            mean = mean.add(s)?;
        }
        let mean = mean.scale(T::one() / T::from_f64_c(k as f64));
        for s in slices.iter_mut() {
            *s = s.sub(&mean)?;
        }
    }
    let mut sizes = vec![dim; order];
    sizes.push(k);
    let mut out = DenseTensor::zeros(&sizes);
    let block = dim.pow(order as u32);
    let mut values = Vec::with_capacity(block * k);
    for s in &slices {
        values.extend(s.to_vec());
    }
    for (flat, v) in values.into_iter().enumerate() {
        let slice_idx = flat / block;
        let mut rem = flat % block;
        let mut idx = vec![0usize; order + 1];
        for slot in idx.iter_mut().take(order) {
            *slot = rem % dim;
            rem /= dim;
        }
        idx[order] = slice_idx;
        out.set(&idx, v);
    }
    Ok(out)
}
