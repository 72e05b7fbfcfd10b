//! Floating-point scalar abstraction.
//!
//! All geometry (camera model, covariance analysis, pose construction) is
//! written against [`Real`] so the same code runs in `f32` or `f64`. The
//! crate root exposes `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    /// Widens to `f64` for serialization and reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Relative round-off scale used by the iterative eigen solver.
    fn solver_epsilon() -> Self;
}

impl Real for f32 {
    fn solver_epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn solver_epsilon() -> Self {
        f64::EPSILON
    }
}
