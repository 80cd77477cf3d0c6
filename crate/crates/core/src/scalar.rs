//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex amplitude over a real scalar `T`.
pub type Complex<T> = num_complex::Complex<T>;

/// Real floating-point scalar the engine is generic over (`f32` or `f64`).
///
/// Tolerances are tied to the scalar: the f64 values are the ones the
/// validation rules are written against, f32 gets looser ones matching its
/// rounding floor.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Tolerance applied when constructors validate normalization,
    /// orthonormality, hermiticity and trace.
    const VALIDATION_TOL: f64;
    /// Overlaps with modulus below this are treated as orthogonal.
    const OVERLAP_ETA: f64;

    /// Converts an `f64` literal. All literals used in the crate are
    /// representable in both supported scalars.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn validation_tol() -> Self {
        Self::lit(Self::VALIDATION_TOL)
    }

    #[inline]
    fn overlap_eta() -> Self {
        Self::lit(Self::OVERLAP_ETA)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const VALIDATION_TOL: f64 = 1e-10;
    const OVERLAP_ETA: f64 = 1e-9;
}

impl Real for f32 {
    const VALIDATION_TOL: f64 = 1e-5;
    const OVERLAP_ETA: f64 = 1e-4;
}

#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
