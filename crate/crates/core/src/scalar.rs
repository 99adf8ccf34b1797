//! Scalar abstraction used throughout the crate.
//!
//! All numerics are written against [`Scalar`] so that the same code runs in
//! `f32` or `f64`. Tolerance-certified routines are tuned for `f64`; `f32`
//! instantiations work but bottom out at single precision.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand cast from an `f64` literal into the working scalar type.
#[inline]
pub fn fl<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// `sin(x)/x` with the removable singularity filled in.
///
/// A fifth-order Taylor step is used below `|x| = 1e-4`, which keeps the
/// result accurate to full double precision across the switch.
#[inline]
pub fn sinc<T: Scalar>(x: T) -> T {
    if x.abs() < fl(1e-4) {
        let x2 = x * x;
        T::one() - x2 / fl(6.0) + x2 * x2 / fl(120.0)
    } else {
        x.sin() / x
    }
}

/// `sinc(x)` raised to an integer power, shared by the B-spline spectra so the
/// centered and non-centered variants produce bit-identical magnitudes.
#[inline]
pub fn sinc_pow<T: Scalar>(x: T, n: u32) -> T {
    sinc(x).powi(n as i32)
}
