use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

use crate::linalg::Lapack;

/// Floating-point scalar the whole crate is generic over.
///
/// Only `f32` and `f64` implement it: the dense eigensolvers are LAPACK
/// routines, which exist in exactly those two precisions.
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
    + LowerExp
    + Send
    + Sync
    + 'static
    + FftNum
    + LinalgScalar
    + ScalarOperand
    + Lapack
{
    /// Converts an `f64` literal. Every literal in this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to float")
    }

    /// Machine epsilon as `f64`, for tolerance arithmetic done in double.
    fn epsilon_f64() -> f64 {
        Self::epsilon().to_f64().unwrap_or(f64::EPSILON)
    }
}

impl Real for f32 {}
impl Real for f64 {}
