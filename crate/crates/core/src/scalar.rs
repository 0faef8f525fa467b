//! Scalar abstraction for the whole crate.
//!
//! Every geometric type is generic over a [`Real`] scalar so the same code
//! runs in `f32` for quick smoke tests and in `f64` for the actual
//! experiments. The trait is a thin alias over the `num-traits` float
//! hierarchy plus the bounds the concurrent mesh code needs.

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for literals inside generic code.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Lossy conversion from `usize` counts.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("small usize converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
