//! Scalar abstraction for all numeric kernels.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! code runs in `f32` or `f64`. The crate root exports `f64` aliases, which
//! is what the CLI and the training recipe use.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar usable in grids, metrics and tensors.
pub trait Scalar:
    Float + FloatConst + NumAssignOps + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` literals and parsed input.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
