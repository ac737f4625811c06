//! Scalar abstraction shared by the linear algebra, state and distance code.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the matrix code is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Smallest tolerance that is meaningful at this precision.
    ///
    /// Validation thresholds are clamped from below by this value so that a
    /// configuration tuned for `f64` still accepts well-formed `f32` data.
    fn tolerance_floor() -> Self {
        Self::epsilon() * Self::from_f64(64.0).unwrap()
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` tolerance into `T`, never going below [`Real::tolerance_floor`].
pub(crate) fn tol<T: Real>(x: f64) -> T {
    T::lit(x).max(T::tolerance_floor())
}
