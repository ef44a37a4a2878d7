//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the diagnostics are computed in: `f64` for production use,
/// `f32` when memory matters more than the last few digits.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative pivot floor for the Cholesky factorization. A pivot at or
    /// below `PIVOT_EPS` times its own diagonal entry is treated as loss of
    /// positive definiteness.
    const PIVOT_EPS: f64;

    /// Converts an `f64` constant. Never fails for finite inputs on the
    /// supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const PIVOT_EPS: f64 = 1e-12;
}

impl Scalar for f32 {
    const PIVOT_EPS: f64 = 1e-6;
}
