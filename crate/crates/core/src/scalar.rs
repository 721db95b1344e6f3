use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the analytic layer is written against.
///
/// Blanket-implemented for `f32` and `f64`. Tolerances are given as `f64`
/// literals and clamped from below by a multiple of the type's epsilon, so
/// the same code path stays meaningful in single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Tolerance `v`, but never tighter than 64 ulps at unit scale.
    #[inline]
    fn tol(v: f64) -> Self {
        Self::lit(v).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// `x^p` evaluated as `exp(p ln x)` for `x > 0`.
#[inline]
pub(crate) fn pow<T: Real>(x: T, p: T) -> T {
    (p * x.ln()).exp()
}
