//! Scalar abstraction for the numeric kernels.
//!
//! Curve fitting, kinematic integration, and overlap evaluation are written
//! against [`Scalar`] so they run in `f32` or `f64`. The solver pipeline
//! instantiates everything at [`crate::Real`].

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + std::iter::Sum + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Lossy cast from `f64`, for constants and time conversions.
    fn from_f64_lossy(value: f64) -> Self {
        num_traits::cast(value).expect("finite f64 converts to any Scalar")
    }

    /// Lossy cast to `f64`, for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        num_traits::cast(self).expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
