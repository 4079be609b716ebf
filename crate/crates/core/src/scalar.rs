//! Floating-point scalar abstraction: the model runs on `f32` or `f64`.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Scalar type for weights, patterns and cue signals.
///
/// The persisted weight-file format and the CLI are fixed to `f64` (eight
/// bytes per weight); `f32` instantiations are available for in-memory use.
pub trait Real:
    Float + FromPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// How far a pattern's squared L2 norm may deviate from 1 before the
    /// training preconditions reject it.
    fn norm_tolerance() -> Self;

    /// Error-function value below which iterative training stops.
    fn convergence_tolerance() -> Self;
}

impl Real for f64 {
    fn norm_tolerance() -> f64 {
        1e-9
    }
    fn convergence_tolerance() -> f64 {
        1e-9
    }
}

impl Real for f32 {
    fn norm_tolerance() -> f32 {
        1e-4
    }
    fn convergence_tolerance() -> f32 {
        1e-6
    }
}

/// Shorthand for `T::from_f64(v).unwrap()`, used for numeric literals.
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}
