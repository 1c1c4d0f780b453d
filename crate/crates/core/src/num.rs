use std::fmt::Display;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar the estimators and detectors are generic over.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + NumAssign + FftNum + Display {
    /// Converts sample counts and indexes into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Shorthand for embedding `f64` constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl<T> Scalar for T where T: Float + FloatConst + FromPrimitive + NumAssign + FftNum + Display {}
