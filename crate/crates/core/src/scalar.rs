use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Scalar type over which the whole toolkit is generic.
///
/// `NdFloat` bundles `num_traits::Float` with the ndarray operand traits, so
/// the bound is satisfied by `f32` and `f64`. Complex scalars are not
/// supported.
pub trait Scalar: NdFloat + FromPrimitive + Default + Send + Sync + std::iter::Sum {
    /// Lossless-enough conversion from `f64` used by constants and RNG draws.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }
}

impl<T> Scalar for T where T: NdFloat + FromPrimitive + Default + Send + Sync + std::iter::Sum {}
