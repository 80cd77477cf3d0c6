use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::operator::{HermitianOperator, Operator};
use crate::hilbert::state::{dot, StateVector};
use crate::scalar::{c, Complex, Real};

/// Ordered orthonormal basis `{|a⟩}` with a label.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T: Real> {
    label: String,
    states: Vec<StateVector<T>>,
}

impl<T: Real> Basis<T> {
    pub fn new(label: impl Into<String>, states: Vec<StateVector<T>>) -> Result<Self> {
        Self::new_with_tol(label, states, T::validation_tol())
    }

    pub fn new_with_tol(label: impl Into<String>, states: Vec<StateVector<T>>, tol: T) -> Result<Self> {
        let d = states.len();
        if d < 2 {
            return Err(KdError::InvalidDimension(d));
        }
        for s in &states {
            ensure_dim(d, s.dim())?;
        }
        let basis = Self {
            label: label.into(),
            states,
        };
        let dev = basis.orthonormality_deviation();
        if dev > tol {
            return Err(KdError::NotOrthonormal(dev.to_f64_lossy()));
        }
        Ok(basis)
    }

    /// Basis formed by the columns of `u`.
    pub fn from_columns(label: impl Into<String>, u: &Operator<T>) -> Result<Self> {
        let d = u.dim();
        let states = (0..d)
            .map(|j| StateVector::new((0..d).map(|i| u.get(i, j)).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, states)
    }

    pub(crate) fn from_raw(label: impl Into<String>, states: Vec<StateVector<T>>) -> Self {
        Self {
            label: label.into(),
            states,
        }
    }

    /// Standard unit vectors, label `"Z"`.
    pub fn computational(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(KdError::InvalidDimension(d));
        }
        let states = (0..d).map(|k| StateVector::basis_state(d, k)).collect::<Result<_>>()?;
        Ok(Self::from_raw("Z", states))
    }

    /// Discrete Fourier basis, `⟨a|b⟩ = exp(2πi·ab/d)/√d`, label `"F"`.
    pub fn fourier(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(KdError::InvalidDimension(d));
        }
        let dt = T::from_usize(d).unwrap();
        let amp = T::one() / dt.sqrt();
        let states = (0..d)
            .map(|b| {
                let amps = (0..d)
                    .map(|a| {
                        // reduce ab mod d before the float conversion to keep the phase exact
                        let k = T::from_usize((a * b) % d).unwrap();
                        Complex::from_polar(amp, T::TAU() * k / dt)
                    })
                    .collect();
                StateVector::from_raw(amps)
            })
            .collect();
        Ok(Self::from_raw("F", states))
    }

    /// Qubit `σ_x` eigenbasis `{|+⟩, |−⟩}`, label `"X"`.
    pub fn pauli_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(
            "X",
            vec![
                StateVector::from_raw(vec![c(h, 0.0), c(h, 0.0)]),
                StateVector::from_raw(vec![c(h, 0.0), c(-h, 0.0)]),
            ],
        )
    }

    /// Qubit `σ_y` eigenbasis `{|y+⟩, |y−⟩}`, label `"Y"`.
    pub fn pauli_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(
            "Y",
            vec![
                StateVector::from_raw(vec![c(h, 0.0), c(0.0, h)]),
                StateVector::from_raw(vec![c(h, 0.0), c(0.0, -h)]),
            ],
        )
    }

    /// Eigenbasis of `h` with the canonical ordering of
    /// [`HermitianOperator::eigen`]; returns the eigenvalues alongside.
    pub fn eigenbasis(label: impl Into<String>, h: &HermitianOperator<T>) -> (Vec<T>, Self) {
        let eig = h.eigen();
        (eig.values, Self::from_raw(label, eig.vectors))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &StateVector<T> {
        &self.states[i]
    }

    pub fn states(&self) -> &[StateVector<T>] {
        &self.states
    }

    pub fn relabeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `d×d` row-major table of `⟨self_i|other_j⟩`.
    pub fn overlaps(&self, other: &Self) -> Result<Vec<Complex<T>>> {
        ensure_dim(self.dim(), other.dim())?;
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for s in &self.states {
            for o in &other.states {
                out.push(dot(s.amplitudes(), o.amplitudes()));
            }
        }
        Ok(out)
    }

    /// Smallest `|⟨self_i|other_j⟩|` over all pairs.
    pub fn min_overlap(&self, other: &Self) -> Result<T> {
        Ok(self
            .overlaps(other)?
            .iter()
            .map(|z| z.norm())
            .fold(T::infinity(), T::min))
    }

    /// Matrix whose columns are the basis states.
    pub fn to_matrix(&self) -> Operator<T> {
        Operator::from_fn(self.dim(), |i, j| self.states[j].amp(i))
    }

    pub fn orthonormality_deviation(&self) -> T {
        let d = self.dim();
        let mut dev = T::zero();
        for i in 0..d {
            for j in i..d {
                let ip = dot(self.states[i].amplitudes(), self.states[j].amplitudes());
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((ip - Complex::new(target, T::zero())).norm());
            }
        }
        dev
    }

    /// Label equality AND entrywise state agreement within `tol`.
    pub fn matches(&self, other: &Self, tol: T) -> bool {
        self.label == other.label
            && self.dim() == other.dim()
            && self.states.iter().zip(&other.states).all(|(s, o)| {
                s.amplitudes()
                    .iter()
                    .zip(o.amplitudes())
                    .all(|(x, y)| (x - y).norm() <= tol)
            })
    }
}

pub(crate) fn ensure_same_basis<T: Real>(expected: &Basis<T>, found: &Basis<T>, role: &str) -> Result<()> {
    if expected.matches(found, T::validation_tol()) {
        Ok(())
    } else {
        Err(KdError::BasisMismatch(format!(
            "{role}: expected basis '{}', found '{}'",
            expected.label(),
            found.label()
        )))
    }
}
