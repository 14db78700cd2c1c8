//! Real scalar abstraction for the state-space layer.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Floating-point scalar usable by the Gaussian-state, dynamics and
/// metrology code: `f32` or `f64`.
pub trait Real: RealField + ToPrimitive + Copy {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Relative rounding scale used when picking default tolerances.
    fn eps() -> Self {
        Self::default_epsilon()
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{iθ}`.
pub(crate) fn phase<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
