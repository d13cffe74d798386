//! Numeric abstraction shared by graphs, searches and indexes.
//!
//! Travel times and planar coordinates are stored in a single floating-point
//! type `T`. Everything is generic over [`Scalar`], and the crate root exposes
//! `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts from `f64`, rounding to the nearest representable value.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    /// Widens to `f64`. Exact for `f32` and `f64`.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Total order for values known not to be NaN.
pub(crate) fn cmp_scalar<T: Scalar>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widening_round_trips() {
        assert_eq!(<f32 as Scalar>::from_f64_lossy(0.5).as_f64(), 0.5);
        assert_eq!(<f64 as Scalar>::from_f64_lossy(1e-300), 1e-300);
        assert!(<f32 as Scalar>::from_f64_lossy(f64::INFINITY).is_infinite());
    }
}
