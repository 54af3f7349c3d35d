//! Scalar abstraction shared by the linear algebra, state and asymptotics code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
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
        Self::from_f64(x).expect("finite literal")
    }

    /// Scales an absolute tolerance stated for `f64` so it stays meaningful
    /// at this type's precision: never tighter than 64 ulps of one.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::lit(64.0) * Self::epsilon())
    }
}

impl Real for f32 {}
impl Real for f64 {}
