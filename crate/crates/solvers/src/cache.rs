//! Left/right contraction blocks for the networks `⟨x|A|x⟩` and `⟨x|b⟩`.
//!
//! `left[n]` holds the contraction of everything strictly left of site `n`
//! and `right[n]` of everything from site `n` onward, so the local problem
//! at site `n` combines `left[n]`, the operator core and `right[n + 1]`.
//! Blocks are rebuilt incrementally while sweeping.

use crate::error::{Result, SolverError};
use ndarray::{Array2, Array3, Array4, ArrayView3};
use ttkit_core::Scalar;

/// Three-layer blocks `(bra rank, operator rank, ket rank)` for `⟨x|A|x⟩`.
#[derive(Clone, Debug)]
pub struct ContractionCache<T> {
    pub left: Vec<Array3<T>>,
    pub right: Vec<Array3<T>>,
}

impl<T: Scalar> ContractionCache<T> {
    pub fn empty(n: usize) -> Self {
        let unit = || Array3::from_shape_fn((1, 1, 1), |_| T::one());
        Self {
            left: (0..=n).map(|_| unit()).collect(),
            right: (0..=n).map(|_| unit()).collect(),
        }
    }

    /// Extends `left[n + 1]` from `left[n]` across one site.
    pub fn push_left(
        &mut self,
        n: usize,
        bra: &ArrayView3<T>,
        op: &Array4<T>,
        ket: &ArrayView3<T>,
    ) {
        self.left[n + 1] = advance_left(&self.left[n], bra, op, ket);
    }

    /// Extends `right[n]` from `right[n + 1]` across one site.
    pub fn push_right(
        &mut self,
        n: usize,
        bra: &ArrayView3<T>,
        op: &Array4<T>,
        ket: &ArrayView3<T>,
    ) {
        self.right[n] = advance_right(&self.right[n + 1], bra, op, ket);
    }

    /// Recomputes `left[k]` from scratch and reports the largest deviation
    /// from the stored block (consistency check used in tests).
    pub fn left_deviation(
        &self,
        k: usize,
        bras: &[ArrayView3<T>],
        ops: &[Array4<T>],
        kets: &[ArrayView3<T>],
    ) -> T {
        let mut acc = Array3::from_shape_fn((1, 1, 1), |_| T::one());
        for n in 0..k {
            acc = advance_left(&acc, &bras[n], &ops[n], &kets[n]);
        }
        let stored = &self.left[k];
        let mut dev = T::zero();
        for (a, b) in acc.iter().zip(stored.iter()) {
            let d = (*a - *b).abs();
            if d > dev {
                dev = d;
            }
        }
        dev
    }
}

/// `out[a', α', b'] = Σ L[a, α, b]·bra[a, i, a']·op[α, i, j, α']·ket[b, j, b']`
pub fn advance_left<T: Scalar>(
    l: &Array3<T>,
    bra: &ArrayView3<T>,
    op: &Array4<T>,
    ket: &ArrayView3<T>,
) -> Array3<T> {
    let (ra, i_sz, ra1) = bra.dim();
    let (ro, _, j_sz, ro1) = op.dim();
    let (rb, _, rb1) = ket.dim();
    // step 1: fold the bra into L: t1[(α, b), (i, a')]
    let mut t1 = Array2::zeros((ro * rb, i_sz * ra1));
    for alpha in 0..ro {
        for b in 0..rb {
            for i in 0..i_sz {
                for a1 in 0..ra1 {
                    let mut acc = T::zero();
                    for a in 0..ra {
                        acc = acc + l[[a, alpha, b]] * bra[[a, i, a1]];
                    }
                    t1[[alpha * rb + b, i * ra1 + a1]] = acc;
                }
            }
        }
    }
    // step 2: fold the operator core: t2[(b, a'), (j, α')]
    let mut t2 = Array2::zeros((rb * ra1, j_sz * ro1));
    for b in 0..rb {
        for a1 in 0..ra1 {
            for j in 0..j_sz {
                for o1 in 0..ro1 {
                    let mut acc = T::zero();
                    for alpha in 0..ro {
                        for i in 0..i_sz {
                            acc = acc
                                + t1[[alpha * rb + b, i * ra1 + a1]] * op[[alpha, i, j, o1]];
                        }
                    }
                    t2[[b * ra1 + a1, j * ro1 + o1]] = acc;
                }
            }
        }
    }
    // step 3: fold the ket: out[a', α', b']
    let mut out = Array3::zeros((ra1, ro1, rb1));
    for a1 in 0..ra1 {
        for o1 in 0..ro1 {
            for b1 in 0..rb1 {
                let mut acc = T::zero();
                for b in 0..rb {
                    for j in 0..j_sz {
                        acc = acc + t2[[b * ra1 + a1, j * ro1 + o1]] * ket[[b, j, b1]];
                    }
                }
                out[[a1, o1, b1]] = acc;
            }
        }
    }
    out
}

/// Mirror image of [`advance_left`].
pub fn advance_right<T: Scalar>(
    r: &Array3<T>,
    bra: &ArrayView3<T>,
    op: &Array4<T>,
    ket: &ArrayView3<T>,
) -> Array3<T> {
    let (ra, i_sz, ra1) = bra.dim();
    let (ro, _, j_sz, ro1) = op.dim();
    let (rb, _, rb1) = ket.dim();
    let mut out = Array3::zeros((ra, ro, rb));
    // direct summation keeps the code simple; block sizes are small
    for a in 0..ra {
        for alpha in 0..ro {
            for b in 0..rb {
                let mut acc = T::zero();
                for i in 0..i_sz {
                    for j in 0..j_sz {
                        for a1 in 0..ra1 {
                            for o1 in 0..ro1 {
                                for b1 in 0..rb1 {
                                    acc = acc
                                        + bra[[a, i, a1]]
                                            * op[[alpha, i, j, o1]]
                                            * ket[[b, j, b1]]
                                            * r[[a1, o1, b1]];
                                }
                            }
                        }
                    }
                }
                out[[a, alpha, b]] = acc;
            }
        }
    }
    out
}

/// Two-layer overlap blocks `(x rank, g rank)` for `⟨x|g⟩`-type networks.
#[derive(Clone, Debug)]
pub struct OverlapCache<T> {
    pub left: Vec<Array2<T>>,
    pub right: Vec<Array2<T>>,
}

impl<T: Scalar> OverlapCache<T> {
    pub fn empty(n: usize) -> Self {
        let unit = || Array2::from_shape_fn((1, 1), |_| T::one());
        Self {
            left: (0..=n).map(|_| unit()).collect(),
            right: (0..=n).map(|_| unit()).collect(),
        }
    }

    pub fn push_left(&mut self, n: usize, bra: &ArrayView3<T>, ket: &ArrayView3<T>) {
        self.left[n + 1] = advance_overlap_left(&self.left[n], bra, ket);
    }

    pub fn push_right(&mut self, n: usize, bra: &ArrayView3<T>, ket: &ArrayView3<T>) {
        self.right[n] = advance_overlap_right(&self.right[n + 1], bra, ket);
    }
}

pub fn advance_overlap_left<T: Scalar>(
    l: &Array2<T>,
    bra: &ArrayView3<T>,
    ket: &ArrayView3<T>,
) -> Array2<T> {
    let (ra, i_sz, ra1) = bra.dim();
    let (rb, _, rb1) = ket.dim();
    let mut out = Array2::zeros((ra1, rb1));
    for a1 in 0..ra1 {
        for b1 in 0..rb1 {
            let mut acc = T::zero();
            for a in 0..ra {
                for b in 0..rb {
                    for i in 0..i_sz {
                        acc = acc + l[[a, b]] * bra[[a, i, a1]] * ket[[b, i, b1]];
                    }
                }
            }
            out[[a1, b1]] = acc;
        }
    }
    out
}

pub fn advance_overlap_right<T: Scalar>(
    r: &Array2<T>,
    bra: &ArrayView3<T>,
    ket: &ArrayView3<T>,
) -> Array2<T> {
    let (ra, i_sz, _) = bra.dim();
    let (rb, _, _) = ket.dim();
    let mut out = Array2::zeros((ra, rb));
    for a in 0..ra {
        for b in 0..rb {
            let mut acc = T::zero();
            for i in 0..i_sz {
                for a1 in 0..bra.dim().2 {
                    for b1 in 0..ket.dim().2 {
                        acc = acc + bra[[a, i, a1]] * ket[[b, i, b1]] * r[[a1, b1]];
                    }
                }
            }
            out[[a, b]] = acc;
        }
    }
    out
}

/// Hard cap on the dense local-solve dimension `Rₙ₋₁·Iₙ·Rₙ`.
pub const LOCAL_DIM_CAP: usize = 4096;

pub fn check_local_dim(dim: usize) -> Result<()> {
    if dim > LOCAL_DIM_CAP {
        return Err(SolverError::LocalDimTooLarge { dim, cap: LOCAL_DIM_CAP });
    }
    Ok(())
}
