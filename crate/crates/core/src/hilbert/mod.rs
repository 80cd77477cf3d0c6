//! Dense complex linear algebra for `d`-dimensional systems.
//!
//! Conventions: `ħ = 1`, so time and energy are reciprocal units and
//! `U(t) = exp(−iHt)`. Constructors validate their invariants and reject
//! invalid data instead of repairing it.

mod basis;
mod eigen;
mod operator;
mod state;

pub use basis::Basis;
pub(crate) use basis::ensure_same_basis;
pub use eigen::HermitianEigen;
pub use operator::{sigma_x, sigma_y, sigma_z, DensityOperator, HermitianOperator, Operator};
pub use state::StateVector;
pub(crate) use state::{dot, norm_sqr};

use crate::error::{ensure_dim, Result};
use crate::scalar::{Complex, Real};

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
    u.inner(v)
}

pub fn computational_basis<T: Real>(d: usize) -> Result<Basis<T>> {
    Basis::computational(d)
}

pub fn fourier_basis<T: Real>(d: usize) -> Result<Basis<T>> {
    Basis::fourier(d)
}

/// `U(t) = exp(−iHt)` built from the eigendecomposition of `h`.
pub fn propagator<T: Real>(h: &HermitianOperator<T>, t: T) -> Operator<T> {
    h.eigen().map(|e| Complex::from_polar(T::one(), -e * t))
}

/// Anything that can be carried forward by a unitary.
pub trait Evolve<T: Real>: Sized {
    fn dim(&self) -> usize;
    fn apply_unitary(&self, u: &Operator<T>) -> Self;
}

impl<T: Real> Evolve<T> for StateVector<T> {
    fn dim(&self) -> usize {
        StateVector::dim(self)
    }

    fn apply_unitary(&self, u: &Operator<T>) -> Self {
        StateVector::from_raw(u.apply_raw(self.amplitudes()))
    }
}

impl<T: Real> Evolve<T> for Operator<T> {
    fn dim(&self) -> usize {
        Operator::dim(self)
    }

    fn apply_unitary(&self, u: &Operator<T>) -> Self {
        u.matmul_unchecked(self).matmul_unchecked(&u.adjoint())
    }
}

impl<T: Real> Evolve<T> for DensityOperator<T> {
    fn dim(&self) -> usize {
        self.as_operator().dim()
    }

    fn apply_unitary(&self, u: &Operator<T>) -> Self {
        let rho = self.as_operator().apply_unitary(u);
        // U ρ U† stays a density operator; re-validation would only repeat the eigensolve.
        DensityOperator::new_unchecked(rho)
    }
}

/// Applies `exp(−iHt)` to a state (`U v`) or an operator (`U M U†`).
pub fn evolve<T: Real, V: Evolve<T>>(h: &HermitianOperator<T>, t: T, v: &V) -> Result<V> {
    ensure_dim(h.dim(), v.dim())?;
    Ok(v.apply_unitary(&propagator(h, t)))
}
