//! Scalar abstraction for the numeric kernels.
//!
//! Root algebra, residual recursions and the exact likelihood are written
//! once against [`Scalar`] and instantiated for `f64` (the default used by the
//! estimators and the Monte Carlo layer) and `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for values the type cannot
    /// represent at all (never the case for the constants used here).
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance below which a quantity is treated as zero in this precision.
    fn tiny() -> Self;
}

impl Scalar for f64 {
    fn tiny() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tiny() -> Self {
        1e-6
    }
}
