//! Property tests for the core invariants.

use proptest::prelude::*;
use ttkit_core::{io, DenseTensor, TTTrain};

fn small_shape() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_unfold_roundtrip(shape in small_shape(), seed in 0u64..1000) {
        let x = DenseTensor::<f64>::random_normal(&shape, seed);
        let v = x.to_vec();
        let back = DenseTensor::from_vec(&shape, v.clone()).unwrap();
        prop_assert_eq!(&x, &back);
        prop_assert_eq!(back.to_vec(), v);
    }

    #[test]
    fn tt_svd_roundtrip(shape in small_shape(), seed in 0u64..1000) {
        let x = DenseTensor::<f64>::random_normal(&shape, seed);
        let tt = TTTrain::tt_svd(&x, 0.0, usize::MAX).unwrap();
        prop_assert!(tt.contract_full().rel_err(&x) < 1e-12);
        // rank caps respected for any cap
        let capped = TTTrain::tt_svd(&x, 0.0, 2).unwrap();
        prop_assert!(capped.interior_ranks().iter().all(|&r| r <= 2));
    }

    #[test]
    fn round_never_increases_ranks(shape in prop::collection::vec(2usize..=3, 2..=4), seed in 0u64..1000) {
        let a = TTTrain::<f64>::random(&shape, &vec![3; shape.len() - 1], seed).unwrap();
        let rounded = a.round(1e-10, usize::MAX).unwrap();
        for (r_new, r_old) in rounded.interior_ranks().iter().zip(a.interior_ranks().iter()) {
            prop_assert!(r_new <= r_old);
        }
        prop_assert!(rounded.rel_err_dense(&a) < 1e-9);
    }

    #[test]
    fn tt1f_roundtrip_is_exact(shape in prop::collection::vec(2usize..=3, 1..=4), seed in 0u64..1000) {
        let a = TTTrain::<f64>::random(&shape, &vec![2; shape.len().saturating_sub(1)], seed).unwrap();
        let mut buf = Vec::new();
        io::write_train(&mut buf, &a).unwrap();
        let b: TTTrain<f64> = io::read_train(&mut buf.as_slice()).unwrap();
        for (ca, cb) in a.cores().iter().zip(b.cores().iter()) {
            prop_assert_eq!(ca, cb);
        }
    }

    #[test]
    fn dot_self_is_norm_squared(shape in small_shape(), seed in 0u64..1000) {
        let ranks = vec![2; shape.len().saturating_sub(1)];
        let a = TTTrain::<f64>::random(&shape, &ranks, seed).unwrap();
        let d = a.dot(&a).unwrap();
        prop_assert!(d >= -1e-12);
        let n = a.norm();
        prop_assert!((d.max(0.0).sqrt() - n).abs() <= 1e-9 * n.max(1.0));
    }
}
