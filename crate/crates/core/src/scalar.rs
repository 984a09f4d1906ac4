//! Field abstraction shared by every container: real or complex doubles.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Scalar field the solver runs over (`f64` or `Complex64`).
pub trait Scalar:
    Copy
    + Debug
    + Display
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Narrowing conversion; `None` when a real field is asked to hold a
    /// nonzero imaginary part.
    fn from_complex(z: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;

    fn re(self) -> f64;
    fn im(self) -> f64;
    /// Modulus.
    fn abs(self) -> f64;
    fn conj(self) -> Self;
    fn is_finite(self) -> bool;

    fn cos(self) -> Self;
    fn sin(self) -> Self;
    fn cosh(self) -> Self;
    fn sinh(self) -> Self;
    fn sqrt(self) -> Self;

    /// `self / |self|`, with `sign(0) = 1`.
    fn sign(self) -> Self {
        let a = self.abs();
        if a == 0.0 {
            Self::one()
        } else {
            self / a
        }
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn conj(self) -> Self {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cosh(self) -> Self {
        Complex64::cosh(self)
    }
    fn sinh(self) -> Self {
        Complex64::sinh(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
}
