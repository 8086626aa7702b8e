//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable by the spectral and dense kernels: `f32` or `f64`.
///
/// Tolerances quoted throughout the documentation assume `f64`; `f32` builds
/// work but only reach single precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}
