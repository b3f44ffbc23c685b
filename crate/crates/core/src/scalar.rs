use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the filter pipeline runs on: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display
{
    #[doc(hidden)]
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    #[doc(hidden)]
    #[inline]
    fn from_int(x: i64) -> Self {
        Self::from_i64(x).unwrap()
    }

    #[doc(hidden)]
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FftNum
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
{
}
