//! Kirkwood–Dirac joint probabilities `ρ(a,b) = ⟨b|a⟩⟨a|ρ̂|b⟩`, the operator
//! basis `Λ(a,b) = |a⟩⟨b| / ⟨b|a⟩` they expand ρ̂ in, and the weak values
//! `⟨b|M̂|a⟩/⟨b|a⟩` that turn them into expectation values.

use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::{dot, Basis, DensityOperator, Operator};
use crate::scalar::{is_finite, Complex, Real};

/// Complex joint distribution over an ordered basis pair `(A, B)`, stored
/// row-major with index `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdDistribution<T: Real> {
    basis_a: Basis<T>,
    basis_b: Basis<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> KdDistribution<T> {
    /// Wraps externally supplied values (e.g. parsed from a file). Checks
    /// shape, finiteness and `Σ ρ(a,b) = 1`; marginal consistency can be
    /// inspected with [`KdDistribution::marginal_deviation`].
    pub fn from_values(basis_a: Basis<T>, basis_b: Basis<T>, values: Vec<Complex<T>>) -> Result<Self> {
        let d = basis_a.dim();
        ensure_dim(d, basis_b.dim())?;
        ensure_dim(d * d, values.len())?;
        if !values.iter().all(is_finite) {
            return Err(KdError::NonFinite);
        }
        let kd = Self::from_raw(basis_a, basis_b, values);
        let total = kd.total();
        let tol = T::validation_tol();
        if (total.re - T::one()).abs() > tol || total.im.abs() > tol {
            return Err(KdError::InvalidParameter(format!(
                "KD values sum to {} + {}i, expected 1",
                total.re, total.im
            )));
        }
        Ok(kd)
    }

    pub(crate) fn from_raw(basis_a: Basis<T>, basis_b: Basis<T>, values: Vec<Complex<T>>) -> Self {
        Self {
            basis_a,
            basis_b,
            values,
        }
    }

    pub fn basis_a(&self) -> &Basis<T> {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &Basis<T> {
        &self.basis_b
    }

    pub fn dim(&self) -> usize {
        self.basis_a.dim()
    }

    pub fn value(&self, a: usize, b: usize) -> Complex<T> {
        self.values[a * self.dim() + b]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn total(&self) -> Complex<T> {
        self.values.iter().fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// `Σ_b ρ(a,b)` for each `a`: the Born distribution over `A`.
    pub fn row_marginals(&self) -> Vec<Complex<T>> {
        let d = self.dim();
        (0..d)
            .map(|a| self.values[a * d..(a + 1) * d].iter().fold(Complex::new(T::zero(), T::zero()), |s, z| s + z))
            .collect()
    }

    /// `Σ_a ρ(a,b)` for each `b`: the Born distribution over `B`.
    pub fn column_marginals(&self) -> Vec<Complex<T>> {
        let d = self.dim();
        (0..d)
            .map(|b| (0..d).fold(Complex::new(T::zero(), T::zero()), |s, a| s + self.value(a, b)))
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        ensure_dim(self.values.len(), other.values.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).norm())
            .fold(T::zero(), T::max))
    }

    /// Largest deviation of the row/column marginals from the Born
    /// probabilities of the operator these values reconstruct to.
    pub fn marginal_deviation(&self) -> Result<T> {
        let rho = reconstruct_operator(self)?;
        let mut dev = T::zero();
        for (a, m) in self.row_marginals().iter().enumerate() {
            let born = rho.matrix_element_raw(self.basis_a.state(a).amplitudes(), self.basis_a.state(a).amplitudes());
            dev = dev.max((m - born).norm());
        }
        for (b, m) in self.column_marginals().iter().enumerate() {
            let born = rho.matrix_element_raw(self.basis_b.state(b).amplitudes(), self.basis_b.state(b).amplitudes());
            dev = dev.max((m - born).norm());
        }
        Ok(dev)
    }
}

/// `⟨b|a⟩` table indexed `[a·d + b]`, failing on the first pair whose modulus
/// is below the overlap threshold.
pub(crate) fn checked_overlaps<T: Real>(basis_a: &Basis<T>, basis_b: &Basis<T>) -> Result<Vec<Complex<T>>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_b.dim())?;
    let eta = T::overlap_eta();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let ov = dot(basis_b.state(b).amplitudes(), basis_a.state(a).amplitudes());
            if ov.norm() < eta {
                return Err(KdError::NearOrthogonalOverlap {
                    a,
                    b,
                    modulus: ov.norm().to_f64_lossy(),
                });
            }
            out.push(ov);
        }
    }
    Ok(out)
}

/// Smallest `|⟨b|a⟩|` over the pair, or `NearOrthogonalOverlap` naming the
/// first pair below the threshold.
pub fn require_overlaps<T: Real>(basis_a: &Basis<T>, basis_b: &Basis<T>) -> Result<T> {
    Ok(checked_overlaps(basis_a, basis_b)?.iter().map(|z| z.norm()).fold(T::infinity(), T::min))
}

pub(crate) fn checked_index(i: usize, d: usize, what: &str) -> Result<()> {
    if i < d {
        Ok(())
    } else {
        Err(KdError::InvalidParameter(format!("{what} index {i} out of range for dimension {d}")))
    }
}

/// `ρ(a,b) = ⟨b|a⟩⟨a|ρ̂|b⟩`.
pub fn kd_distribution<T: Real>(
    rho: &DensityOperator<T>,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
) -> Result<KdDistribution<T>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_b.dim())?;
    ensure_dim(d, rho.dim())?;
    let mut values = Vec::with_capacity(d * d);
    for a in basis_a.states() {
        // ⟨a|ρ̂ as a row: conj(ρ̂ |a⟩) since ρ̂ is Hermitian
        let rho_a: Vec<Complex<T>> = rho.apply_raw(a.amplitudes()).into_iter().map(|z| z.conj()).collect();
        for b in basis_b.states() {
            let ba = dot(b.amplitudes(), a.amplitudes());
            let a_rho_b = rho_a
                .iter()
                .zip(b.amplitudes())
                .fold(Complex::new(T::zero(), T::zero()), |s, (r, x)| s + r * x);
            values.push(ba * a_rho_b);
        }
    }
    Ok(KdDistribution::from_raw(basis_a.clone(), basis_b.clone(), values))
}

/// `Λ(a,b) = |a⟩⟨b| / ⟨b|a⟩`, trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaOperator<T: Real> {
    pub a: usize,
    pub b: usize,
    pub matrix: Operator<T>,
}

pub fn lambda_operator<T: Real>(a: usize, b: usize, basis_a: &Basis<T>, basis_b: &Basis<T>) -> Result<LambdaOperator<T>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_b.dim())?;
    checked_index(a, d, "a")?;
    checked_index(b, d, "b")?;
    let ket_a = basis_a.state(a);
    let ket_b = basis_b.state(b);
    let ov = dot(ket_b.amplitudes(), ket_a.amplitudes());
    if ov.norm() < T::overlap_eta() {
        return Err(KdError::NearOrthogonalOverlap {
            a,
            b,
            modulus: ov.norm().to_f64_lossy(),
        });
    }
    let inv = ov.inv();
    let matrix = Operator::from_fn(d, |i, j| ket_a.amp(i) * ket_b.amp(j).conj() * inv);
    Ok(LambdaOperator { a, b, matrix })
}

/// `Σ_{a,b} ρ(a,b) Λ(a,b)` without validating the result.
pub fn reconstruct_operator<T: Real>(kd: &KdDistribution<T>) -> Result<Operator<T>> {
    let d = kd.dim();
    let overlaps = checked_overlaps(kd.basis_a(), kd.basis_b())?;
    // M = A · C · B†, with C_ab = ρ(a,b)/⟨b|a⟩ and A, B the basis matrices
    let coef = Operator::from_fn(d, |a, b| kd.values[a * d + b] / overlaps[a * d + b]);
    let a_mat = kd.basis_a().to_matrix();
    let b_adj = kd.basis_b().to_matrix().adjoint();
    Ok(a_mat.matmul_unchecked(&coef).matmul_unchecked(&b_adj))
}

/// Inverts [`kd_distribution`]: `ρ̂ = Σ_{a,b} ρ(a,b) Λ(a,b)`.
pub fn reconstruct_density<T: Real>(kd: &KdDistribution<T>) -> Result<DensityOperator<T>> {
    DensityOperator::new(reconstruct_operator(kd)?)
}

/// Weak value `⟨b|M̂|a⟩ / ⟨b|a⟩`.
pub fn weak_value<T: Real>(
    m: &Operator<T>,
    a: usize,
    b: usize,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
) -> Result<Complex<T>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_b.dim())?;
    ensure_dim(d, m.dim())?;
    checked_index(a, d, "a")?;
    checked_index(b, d, "b")?;
    let ket_a = basis_a.state(a).amplitudes();
    let ket_b = basis_b.state(b).amplitudes();
    let ov = dot(ket_b, ket_a);
    if ov.norm() < T::overlap_eta() {
        return Err(KdError::NearOrthogonalOverlap {
            a,
            b,
            modulus: ov.norm().to_f64_lossy(),
        });
    }
    Ok(m.matrix_element_raw(ket_b, ket_a) / ov)
}

/// All weak values of one operator over a basis pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueTable<T: Real> {
    pub operator: Operator<T>,
    pub basis_a: Basis<T>,
    pub basis_b: Basis<T>,
    /// Row-major `(a, b)`.
    pub values: Vec<Complex<T>>,
}

impl<T: Real> WeakValueTable<T> {
    pub fn value(&self, a: usize, b: usize) -> Complex<T> {
        self.values[a * self.basis_a.dim() + b]
    }
}

pub fn weak_value_table<T: Real>(m: &Operator<T>, basis_a: &Basis<T>, basis_b: &Basis<T>) -> Result<WeakValueTable<T>> {
    let d = basis_a.dim();
    ensure_dim(d, m.dim())?;
    let overlaps = checked_overlaps(basis_a, basis_b)?;
    let mut values = Vec::with_capacity(d * d);
    for a in 0..d {
        let m_a = m.apply_raw(basis_a.state(a).amplitudes());
        for b in 0..d {
            values.push(dot(basis_b.state(b).amplitudes(), &m_a) / overlaps[a * d + b]);
        }
    }
    Ok(WeakValueTable {
        operator: m.clone(),
        basis_a: basis_a.clone(),
        basis_b: basis_b.clone(),
        values,
    })
}

/// `⟨M̂⟩ = Σ_{a,b} ρ(a,b) ⟨b|M̂|a⟩/⟨b|a⟩`. Returned complex: the imaginary
/// part vanishes for Hermitian `M̂` up to rounding.
pub fn expectation<T: Real>(kd: &KdDistribution<T>, m: &Operator<T>) -> Result<Complex<T>> {
    let table = weak_value_table(m, kd.basis_a(), kd.basis_b())?;
    Ok(kd
        .values
        .iter()
        .zip(&table.values)
        .fold(Complex::new(T::zero(), T::zero()), |s, (r, w)| s + r * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{sigma_x, sigma_z, StateVector};
    use crate::random::{random_basis, random_density, seeded_rng};
    use crate::scalar::c;

    fn z() -> Basis<f64> {
        Basis::computational(2).unwrap()
    }
    fn x() -> Basis<f64> {
        Basis::pauli_x()
    }
    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) {
        assert!((a - b).norm() < tol, "{a} vs {b}");
    }

    #[test]
    fn kd_of_zero_state_over_z_x() {
        let rho = DensityOperator::from_pure(&StateVector::basis_state(2, 0).unwrap());
        let kd = kd_distribution(&rho, &z(), &x()).unwrap();
        close(kd.value(0, 0), c(0.5, 0.0), 1e-15);
        close(kd.value(0, 1), c(0.5, 0.0), 1e-15);
        close(kd.value(1, 0), c(0.0, 0.0), 1e-15);
        close(kd.value(1, 1), c(0.0, 0.0), 1e-15);
    }

    #[test]
    fn kd_of_y_plus() {
        let y = Basis::<f64>::pauli_y();
        let rho = DensityOperator::from_pure(y.state(0));
        let kd = kd_distribution(&rho, &z(), &x()).unwrap();
        close(kd.value(0, 0), c(0.25, -0.25), 1e-15);
    }

    #[test]
    fn kd_of_maximally_mixed_over_mub() {
        for d in [2usize, 3, 5] {
            let rho = DensityOperator::maximally_mixed(d);
            let kd = kd_distribution(&rho, &Basis::computational(d).unwrap(), &Basis::fourier(d).unwrap()).unwrap();
            let target = 1.0 / (d * d) as f64;
            for v in kd.values() {
                close(*v, c(target, 0.0), 1e-15);
            }
        }
    }

    #[test]
    fn kd_dimension_mismatch() {
        let rho = DensityOperator::<f64>::maximally_mixed(3);
        assert!(matches!(kd_distribution(&rho, &z(), &x()), Err(KdError::DimensionMismatch { .. })));
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_operator(0, 0, &z(), &z()).unwrap();
        assert!(l.matrix.max_abs_diff(&Operator::projector(z().state(0))).unwrap() < 1e-15);

        let l = lambda_operator(0, 0, &z(), &x()).unwrap();
        let s = std::f64::consts::SQRT_2;
        let expect = Operator::outer(z().state(0), x().state(0)).unwrap().scale(c(s, 0.0));
        assert!(l.matrix.max_abs_diff(&expect).unwrap() < 1e-15);
        close(l.matrix.trace(), c(1.0, 0.0), 1e-15);

        assert!(matches!(lambda_operator(0, 1, &z(), &z()), Err(KdError::NearOrthogonalOverlap { a: 0, b: 1, .. })));
    }

    #[test]
    fn lambda_orthogonality() {
        let mut rng = seeded_rng(11);
        for d in 2..=6 {
            let ba = random_basis::<f64, _>("A", d, &mut rng);
            let bb = random_basis::<f64, _>("B", d, &mut rng);
            let lambdas: Vec<_> = (0..d * d).map(|k| lambda_operator(k / d, k % d, &ba, &bb).unwrap()).collect();
            for l1 in &lambdas {
                let w = dot(bb.state(l1.b).amplitudes(), ba.state(l1.a).amplitudes()).norm_sqr();
                for l2 in &lambdas {
                    let tr = l1.matrix.matmul(&l2.matrix.adjoint()).unwrap().trace() * w;
                    let target = if l1.a == l2.a && l1.b == l2.b { 1.0 } else { 0.0 };
                    close(tr, c(target, 0.0), 1e-10);
                }
            }
        }
    }

    #[test]
    fn reconstruct_examples() {
        let kd = KdDistribution::from_values(z(), x(), vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let rho = reconstruct_density(&kd).unwrap();
        assert!(rho.max_abs_diff(&Operator::projector(z().state(0))).unwrap() < 1e-15);

        let d = 4;
        let w = 1.0 / 16.0;
        let kd = KdDistribution::from_values(
            Basis::<f64>::computational(d).unwrap(),
            Basis::fourier(d).unwrap(),
            vec![c(w, 0.0); d * d],
        )
        .unwrap();
        let rho = reconstruct_density(&kd).unwrap();
        assert!(rho.max_abs_diff(DensityOperator::maximally_mixed(d).as_operator()).unwrap() < 1e-15);
    }

    #[test]
    fn reconstruct_requires_overlap() {
        let kd = KdDistribution::from_values(z(), z(), vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(reconstruct_density(&kd), Err(KdError::NearOrthogonalOverlap { .. })));
    }

    #[test]
    fn round_trip_seeded() {
        let mut rng = seeded_rng(7);
        for i in 0..100 {
            let d = [2, 3, 4, 8][i % 4];
            let rho = random_density::<f64, _>(d, &mut rng);
            let ba = random_basis("A", d, &mut rng);
            let bb = random_basis("B", d, &mut rng);
            let kd = kd_distribution(&rho, &ba, &bb).unwrap();
            let back = reconstruct_density(&kd).unwrap();
            assert!(back.max_abs_diff(&rho).unwrap() < 1e-10);
            assert!(kd.marginal_deviation().unwrap() < 1e-10);
        }
    }

    #[test]
    fn weak_value_examples() {
        let one = Operator::projector(z().state(1));
        let w = weak_value(&one, 0, 1, &z(), &x()).unwrap();
        close(w, c(0.0, 0.0), 1e-15);
        let w = weak_value(&sigma_x(), 0, 1, &z(), &x()).unwrap();
        close(w, c(-1.0, 0.0), 1e-15);
        let mut rng = seeded_rng(3);
        let ba = random_basis::<f64, _>("A", 3, &mut rng);
        let bb = random_basis::<f64, _>("B", 3, &mut rng);
        for a in 0..3 {
            for b in 0..3 {
                close(weak_value(&Operator::identity(3), a, b, &ba, &bb).unwrap(), c(1.0, 0.0), 1e-12);
            }
        }
        assert!(matches!(
            weak_value(&sigma_x(), 0, 1, &z(), &z()),
            Err(KdError::NearOrthogonalOverlap { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let kd = kd_distribution(&DensityOperator::maximally_mixed(2), &z(), &x()).unwrap();
        close(expectation(&kd, &sigma_z()).unwrap(), c(0.0, 0.0), 1e-15);
        let kd = kd_distribution(&DensityOperator::from_pure(z().state(0)), &z(), &x()).unwrap();
        close(expectation(&kd, &sigma_z()).unwrap(), c(1.0, 0.0), 1e-15);
    }
}
