// SPDX-License-Identifier: Apache-2.0

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Scalar type the simulation is generic over: `f32` or `f64`.
///
/// Tolerances quoted in the test suites assume `f64`; `f32` works but with
/// correspondingly looser precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to any Real")
    }

    /// Conversion from a grid or shot count.
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize converts to any Real")
    }

    /// Lossy widening to `f64` for serialization and sampling.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("any Real widens to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
