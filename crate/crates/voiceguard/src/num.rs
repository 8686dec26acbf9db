//! Scalar abstraction: the whole pipeline is generic over `f32`/`f64`.

use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar the DSP and model math is written against.
///
/// `FftNum` carries `Copy + Signed + Debug + Send + Sync + 'static`, so this
/// is satisfied by exactly `f32` and `f64`.
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Display + FftNum {
    /// Lossless-enough conversion from `f64` constants.
    #[inline]
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Conversion from a `usize` count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize count representable in scalar type")
    }

    /// Widen to `f64` for reporting and rank statistics.
    #[inline]
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("scalar widens to f64")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + NumAssign + Sum + Display + FftNum {}
