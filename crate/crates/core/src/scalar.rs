//! Scalar abstractions shared by the numerical kernels.
//!
//! [`Real`] covers the floating types (`f32`, `f64`) used by log-gamma,
//! quadrature, urn probabilities and weight functions. [`Field`] is the
//! weaker requirement of the exact enumeration routines, which also run over
//! rationals.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, ToPrimitive};

/// floating point: f32 or f64
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from `f64` constants.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact-or-approximate arithmetic with ordering: `f64`, `BigRational`, ...
pub trait Field: Num + Clone + PartialOrd + FromPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(&self) -> f64;
}

impl Field for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn to_f64_lossy(&self) -> f64 {
        (*self).into()
    }
}

impl Field for num_rational::BigRational {
    fn to_f64_lossy(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
