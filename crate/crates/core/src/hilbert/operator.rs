use std::ops::{Deref, Index};

use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::eigen::{hermitian_eigen, HermitianEigen};
use crate::hilbert::state::{dot, StateVector};
use crate::scalar::{c, is_finite, Complex, Real};

/// Dense `d×d` complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Operator<T> {
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(KdError::InvalidDimension(0));
        }
        ensure_dim(dim * dim, data.len())?;
        if !data.iter().all(is_finite) {
            return Err(KdError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            ensure_dim(dim, row.len())?;
            data.extend(row);
        }
        Self::from_row_major(dim, data)
    }

    pub(crate) fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Complex::new(T::zero(), T::zero()))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &StateVector<T>, v: &StateVector<T>) -> Result<Self> {
        ensure_dim(u.dim(), v.dim())?;
        Ok(Self::outer_raw(u.amplitudes(), v.amplitudes()))
    }

    pub(crate) fn outer_raw(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn projector(v: &StateVector<T>) -> Self {
        Self::outer_raw(v.amplitudes(), v.amplitudes())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn row_major(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim, other.dim)?;
        Ok(self.matmul_unchecked(other))
    }

    pub(crate) fn matmul_unchecked(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for k in 0..d {
                let lhs = self.data[i * d + k];
                if lhs.re == T::zero() && lhs.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                for (o, r) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += lhs * r;
                }
            }
        }
        Self { dim: d, data: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim, other.dim)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim, other.dim)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.get(i, i))
    }

    pub fn apply(&self, v: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        ensure_dim(self.dim, v.dim())?;
        Ok(self.apply_raw(v.amplitudes()))
    }

    pub(crate) fn apply_raw(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (m, x)| acc + m * x)
            })
            .collect()
    }

    /// `⟨u|M|v⟩`.
    pub fn matrix_element(&self, u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
        ensure_dim(self.dim, u.dim())?;
        ensure_dim(self.dim, v.dim())?;
        Ok(self.matrix_element_raw(u.amplitudes(), v.amplitudes()))
    }

    pub(crate) fn matrix_element_raw(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
        dot(u, &self.apply_raw(v))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        ensure_dim(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let d = self.dim;
        let mut dev = T::zero();
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }
}

impl<T: Real> Index<(usize, usize)> for Operator<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

/// Operator with `M_ij = conj(M_ji)` within the validation tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Real>(Operator<T>);

impl<T: Real> HermitianOperator<T> {
    pub fn new(op: Operator<T>) -> Result<Self> {
        Self::new_with_tol(op, T::validation_tol())
    }

    pub fn new_with_tol(op: Operator<T>, tol: T) -> Result<Self> {
        let dev = op.hermiticity_deviation();
        if dev > tol {
            return Err(KdError::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(Self(op))
    }

    pub(crate) fn from_raw(op: Operator<T>) -> Self {
        Self(op)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Operator::zeros(dim))
    }

    /// Eigenvalues ascending, eigenvectors canonicalized (see [`HermitianEigen`]).
    pub fn eigen(&self) -> HermitianEigen<T> {
        hermitian_eigen(&self.0)
    }

    pub fn as_operator(&self) -> &Operator<T> {
        &self.0
    }

    pub fn into_operator(self) -> Operator<T> {
        self.0
    }
}

impl<T: Real> Deref for HermitianOperator<T> {
    type Target = Operator<T>;

    fn deref(&self) -> &Operator<T> {
        &self.0
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real>(Operator<T>);

impl<T: Real> DensityOperator<T> {
    pub fn new(op: Operator<T>) -> Result<Self> {
        Self::new_with_tol(op, T::validation_tol())
    }

    pub fn new_with_tol(op: Operator<T>, tol: T) -> Result<Self> {
        let herm = op.hermiticity_deviation();
        if herm > tol {
            return Err(KdError::NotDensityOperator(format!(
                "not Hermitian (deviation {:e})",
                herm.to_f64_lossy()
            )));
        }
        let tr = op.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(KdError::NotDensityOperator(format!(
                "trace {} + {}i differs from 1",
                tr.re, tr.im
            )));
        }
        let min_eig = hermitian_eigen(&op).values.first().copied().unwrap_or_else(T::zero);
        if min_eig < -tol {
            return Err(KdError::NotDensityOperator(format!(
                "negative eigenvalue {:e}",
                min_eig.to_f64_lossy()
            )));
        }
        Ok(Self(op))
    }

    pub(crate) fn new_unchecked(op: Operator<T>) -> Self {
        Self(op)
    }

    /// Promotes a pure state to `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        Self(Operator::projector(psi))
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize(dim).expect("dimension fits scalar");
        Self(Operator::identity(dim).scale(Complex::new(w, T::zero())))
    }

    /// Born probability `⟨a|ρ̂|a⟩` (real part; the imaginary part vanishes for Hermitian ρ̂).
    pub fn born(&self, a: &StateVector<T>) -> Result<T> {
        Ok(self.0.matrix_element(a, a)?.re)
    }

    pub fn as_operator(&self) -> &Operator<T> {
        &self.0
    }

    pub fn into_operator(self) -> Operator<T> {
        self.0
    }
}

impl<T: Real> Deref for DensityOperator<T> {
    type Target = Operator<T>;

    fn deref(&self) -> &Operator<T> {
        &self.0
    }
}

impl<T: Real> From<&StateVector<T>> for DensityOperator<T> {
    fn from(psi: &StateVector<T>) -> Self {
        Self::from_pure(psi)
    }
}

/// Pauli `σ_x`.
pub fn sigma_x<T: Real>() -> HermitianOperator<T> {
    HermitianOperator(Operator::from_fn(2, |i, j| {
        if i != j {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    }))
}

/// Pauli `σ_y`.
pub fn sigma_y<T: Real>() -> HermitianOperator<T> {
    HermitianOperator(Operator::from_fn(2, |i, j| match (i, j) {
        (0, 1) => c(0.0, -1.0),
        (1, 0) => c(0.0, 1.0),
        _ => c(0.0, 0.0),
    }))
}

/// Pauli `σ_z`.
pub fn sigma_z<T: Real>() -> HermitianOperator<T> {
    HermitianOperator(Operator::from_fn(2, |i, j| match (i, j) {
        (0, 0) => c(1.0, 0.0),
        (1, 1) => c(-1.0, 0.0),
        _ => c(0.0, 0.0),
    }))
}
