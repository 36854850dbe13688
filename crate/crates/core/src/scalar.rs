use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive, Zero};

/// Floating point scalar used by the image-domain math: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    #[inline]
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A pixel or coefficient value: a real scalar or a complex chroma sample.
///
/// Everything linear (resampling, Haar analysis, frame differencing) is
/// written once against this trait and reused for luma and chroma planes.
pub trait Sample<T: Scalar>:
    Copy
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<T, Output = Self>
    + Send
    + Sync
    + Debug
    + 'static
{
}

impl<T: Scalar> Sample<T> for T {}
impl<T: Scalar> Sample<T> for Complex<T> {}

/// Wavelet coefficient: adds the conjugate product and squared magnitude
/// used by the moment recursion (`x y*` and `|x|^2`).
pub trait Coefficient<T: Scalar>: Sample<T> {
    fn conj_mul(self, other: Self) -> Self;
    fn norm_sqr(self) -> T;
    fn magnitude(self) -> T;
}

impl<T: Scalar> Coefficient<T> for T {
    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        self * other
    }

    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }

    #[inline]
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Scalar> Coefficient<T> for Complex<T> {
    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        self * other.conj()
    }

    #[inline]
    fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    fn magnitude(self) -> T {
        self.norm()
    }
}
