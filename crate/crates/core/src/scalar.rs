//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the geometry is generic over: `f32`, `f64`, or a
/// forward-mode [`Dual`](crate::dual::Dual) wrapping one of them.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal. Panics only if the type cannot represent
    /// finite `f64` values, which none of the implementors do.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar type cannot represent an f64 literal")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A tolerance stated for double precision, floored at a small multiple of
/// machine epsilon so it stays meaningful in single precision.
#[inline]
pub fn tolerance<T: Real>(double_precision: f64) -> T {
    T::lit(double_precision).max(T::epsilon() * T::lit(256.0))
}

/// `|a - b| / max(1, |a|, |b|)`.
#[inline]
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    (a - b).abs() / T::one().max(a.abs()).max(b.abs())
}
