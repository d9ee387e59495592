use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Floating-point scalar the toolkit is generic over: f32 or f64.
pub trait Scalar: NdFloat + FromPrimitive {
    /// Shorthand for converting an `f64` literal into `Self`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
