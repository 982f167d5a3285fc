//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Vector arithmetic is generic over [`Scalar`] (`f32` or `f64`). Reductions
//! (dot products, norms, sums over modalities) always accumulate in `f64`
//! regardless of the element type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// floating point element type: f32 or f64
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
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
    /// Widen to the accumulation type.
    fn widen(self) -> f64;

    /// Narrow from the accumulation type (round-to-nearest for `f32`).
    fn narrow(x: f64) -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn widen(self) -> f64 {
        self as f64
    }

    #[inline]
    fn narrow(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    #[inline]
    fn widen(self) -> f64 {
        self
    }

    #[inline]
    fn narrow(x: f64) -> Self {
        x
    }
}

/// Dot product with `f64` accumulation, summed left to right.
#[inline]
pub fn dot_wide<A: Scalar, B: Scalar>(a: &[A], b: &[B]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        acc += x.widen() * y.widen();
    }
    acc
}

/// Squared Euclidean norm with `f64` accumulation.
#[inline]
pub fn norm_sq_wide<T: Scalar>(a: &[T]) -> f64 {
    dot_wide(a, a)
}
