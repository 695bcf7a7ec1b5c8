//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the library can run on.
///
/// The default tolerances differ by precision: asking `f32` for `1e-11`
/// would only drive the step controller into underflow.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default relative integration tolerance.
    const REL_TOL: f64;
    /// Default absolute integration tolerance.
    const ABS_TOL: f64;
    /// Relative stopping criterion for the AGM iteration.
    const AGM_TOL: f64;

    /// Converts an `f64` literal. Values are always representable up to rounding.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const REL_TOL: f64 = 1e-11;
    const ABS_TOL: f64 = 1e-12;
    const AGM_TOL: f64 = 1e-15;
}

impl Real for f32 {
    const REL_TOL: f64 = 1e-5;
    const ABS_TOL: f64 = 1e-6;
    const AGM_TOL: f64 = 1e-7;
}

/// Shorthand for `T::lit`.
#[inline]
pub fn c<T: Real>(x: f64) -> T {
    T::lit(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_roundtrip() {
        assert_eq!(c::<f64>(0.25), 0.25);
        assert_eq!(c::<f32>(0.25), 0.25f32);
        assert_eq!(3.5f32.as_f64(), 3.5);
    }
}
