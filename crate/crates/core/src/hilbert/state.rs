use crate::error::{ensure_dim, KdError, Result};
use crate::scalar::{is_finite, Complex, Real};

/// Normalized pure state of a `d`-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Validates finiteness and `‖v‖² = 1` within the scalar's validation tolerance.
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        Self::new_with_tol(amps, T::validation_tol())
    }

    pub fn new_with_tol(amps: Vec<Complex<T>>, tol: T) -> Result<Self> {
        if amps.is_empty() {
            return Err(KdError::InvalidDimension(0));
        }
        if !amps.iter().all(is_finite) {
            return Err(KdError::NonFinite);
        }
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - T::one()).abs() > tol {
            return Err(KdError::NotNormalized(norm_sqr.to_f64_lossy()));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm. Fails on the zero vector.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(KdError::InvalidDimension(0));
        }
        if !amps.iter().all(is_finite) {
            return Err(KdError::NonFinite);
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm <= T::min_positive_value() {
            return Err(KdError::NotNormalized(0.0));
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// The unit vector `|k⟩` of dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 {
            return Err(KdError::InvalidDimension(0));
        }
        if k >= dim {
            return Err(KdError::InvalidParameter(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[k] = Complex::new(T::one(), T::zero());
        Ok(Self { amps })
    }

    pub(crate) fn from_raw(amps: Vec<Complex<T>>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> Complex<T> {
        self.amps[i]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(dot(&self.amps, &other.amps))
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }
}

/// `Σ conj(u_i) v_i`; callers guarantee equal lengths.
#[inline]
pub(crate) fn dot<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter()
        .zip(v)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub(crate) fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}
