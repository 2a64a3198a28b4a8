//! Scalar abstractions.
//!
//! [`Real`] is the floating point type everything is computed in (`f32` or
//! `f64`). [`Coefficient`] is anything an [`Expression`](crate::Expression)
//! can be evaluated into: plain reals, order-2 jets and truncated Taylor
//! polynomials all implement it, so the parser, the linear algebra and the
//! local geometry are written once.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar used for all numerical work.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A commutative ring element over `T` with a reciprocal.
///
/// `value()` is the constant term (the value at the expansion point for jets).
/// `recip()` is only defined when `value()` is nonzero; callers check first.
pub trait Coefficient<T: Real>:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: T) -> Self;
    fn value(&self) -> T;
    fn recip(&self) -> Self;
    fn scale(&self, c: T) -> Self;

    fn zero() -> Self {
        Self::constant(T::zero())
    }

    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Real> Coefficient<T> for T {
    fn constant(c: T) -> Self {
        c
    }

    fn value(&self) -> T {
        *self
    }

    fn recip(&self) -> Self {
        T::one() / *self
    }

    fn scale(&self, c: T) -> Self {
        *self * c
    }
}
