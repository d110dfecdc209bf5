//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
///
/// Accuracy targets quoted in the documentation (quadrature tolerances,
/// FDT identity to 1e-10, …) assume `f64`. The `f32` instantiation is kept
/// usable for closed forms and the phase-space solver, where single
/// precision is often enough.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Convert an `f64` literal into this scalar type.
    fn of(x: f64) -> Self;

    /// Lossy conversion back to `f64` (for IO and diagnostics).
    fn f64(self) -> f64;

    /// Convert a count.
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline(always)]
            fn of(x: f64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        assert_eq!(<f64 as Real>::of(0.125), 0.125);
        assert_eq!(<f32 as Real>::of(0.125).f64(), 0.125);
        assert_eq!(<f64 as Real>::of_usize(7), 7.0);
    }
}
