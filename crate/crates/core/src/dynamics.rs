//! Time-resolved KD distributions. Measurement bases are carried along in
//! the Heisenberg picture, `|a(t)⟩ = U†(t)|a⟩` with `U(t) = exp(−iHt)`, so
//! that `⟨a(t)|ρ̂|a(t)⟩` is the probability of finding `a` at time `t` for the
//! fixed initial state `ρ̂`.

use crate::determinism::{conditional_kernel, transform_kd_second, ConditionalKernel};
use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::{dot, propagator, Basis, DensityOperator, HermitianOperator, StateVector};
use crate::kd::{checked_index, checked_overlaps, kd_distribution, KdDistribution};
use crate::scalar::{Complex, Real};

/// Basis `A` seen at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedBasis<T: Real> {
    pub base: Basis<T>,
    pub hamiltonian: HermitianOperator<T>,
    pub t: T,
    basis: Basis<T>,
}

impl<T: Real> TimedBasis<T> {
    /// The evolved states, labelled `"<base>@<t>"`.
    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn into_basis(self) -> Basis<T> {
        self.basis
    }
}

pub fn timed_basis<T: Real>(base: &Basis<T>, h: &HermitianOperator<T>, t: T) -> Result<TimedBasis<T>> {
    ensure_dim(base.dim(), h.dim())?;
    if !t.is_finite() {
        return Err(KdError::NonFinite);
    }
    let u_dag = propagator(h, -t);
    let states = base
        .states()
        .iter()
        .map(|s| StateVector::from_raw(u_dag.apply_raw(s.amplitudes())))
        .collect();
    Ok(TimedBasis {
        base: base.clone(),
        hamiltonian: h.clone(),
        t,
        basis: Basis::from_raw(format!("{}@{}", base.label(), t), states),
    })
}

/// KD distribution over `(A@t1, A@t2)`.
pub fn two_time_kd<T: Real>(
    rho: &DensityOperator<T>,
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    t1: T,
    t2: T,
) -> Result<KdDistribution<T>> {
    ensure_dim(base.dim(), rho.dim())?;
    let b1 = timed_basis(base, h, t1)?.into_basis();
    let b2 = timed_basis(base, h, t2)?.into_basis();
    checked_overlaps(&b1, &b2)?;
    kd_distribution(rho, &b1, &b2)
}

/// Same distribution reached from a reference pair `(A@t1, B)` by swapping
/// the second slot through `ρ(a1,a2) = Σ_b p(a2|a1,b) ρ(a1,b)`.
pub fn two_time_kd_via<T: Real>(
    rho: &DensityOperator<T>,
    base: &Basis<T>,
    reference: &Basis<T>,
    h: &HermitianOperator<T>,
    t1: T,
    t2: T,
) -> Result<KdDistribution<T>> {
    let b1 = timed_basis(base, h, t1)?.into_basis();
    let b2 = timed_basis(base, h, t2)?.into_basis();
    checked_overlaps(&b1, &b2)?;
    let kd1 = kd_distribution(rho, &b1, reference)?;
    transform_kd_second(&kd1, &conditional_kernel(&b2, &b1, reference)?)
}

/// Moves the second time of a two-time distribution from `t2` to `t3`:
/// `ρ(a1,a3) = Σ_{a2} p(a3|a1,a2) ρ(a1,a2)`. Both timed bases of `kd12` are
/// taken from the distribution itself.
pub fn three_time_step<T: Real>(
    kd12: &KdDistribution<T>,
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    t3: T,
) -> Result<KdDistribution<T>> {
    ensure_dim(kd12.dim(), base.dim())?;
    let b3 = timed_basis(base, h, t3)?.into_basis();
    checked_overlaps(kd12.basis_a(), &b3)?;
    let kernel = conditional_kernel(&b3, kd12.basis_a(), kd12.basis_b())?;
    transform_kd_second(kd12, &kernel)
}

/// Chained conditional `p(a_n|a_1,a_2)` for measurement times `t_1..t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathKernel<T: Real> {
    pub times: Vec<T>,
    pub base: Basis<T>,
    pub hamiltonian: HermitianOperator<T>,
    /// Indexed `(a_n·d + a_1)·d + a_2`.
    pub values: Vec<Complex<T>>,
}

impl<T: Real> PathKernel<T> {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn value(&self, an: usize, a1: usize, a2: usize) -> Complex<T> {
        let d = self.dim();
        self.values[(an * d + a1) * d + a2]
    }

    /// `max_{a1,a2} |Σ_{a_n} p(a_n|a1,a2) − 1|`.
    pub fn normalization_deviation(&self) -> T {
        let d = self.dim();
        let mut dev = T::zero();
        for a1 in 0..d {
            for a2 in 0..d {
                let s = (0..d).fold(Complex::new(T::zero(), T::zero()), |s, an| s + self.value(an, a1, a2));
                dev = dev.max((s - Complex::new(T::one(), T::zero())).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, kernel: &ConditionalKernel<T>) -> Result<T> {
        ensure_dim(self.values.len(), kernel.values().len())?;
        Ok(self
            .values
            .iter()
            .zip(kernel.values())
            .map(|(x, y)| (x - y).norm())
            .fold(T::zero(), T::max))
    }
}

/// `p(a_n|a_1,a_2) = Σ p(a_n|a_1,a_{n−1}) ⋯ p(a_3|a_1,a_2)`, summed over the
/// intermediate outcomes.
pub fn path_kernel<T: Real>(base: &Basis<T>, h: &HermitianOperator<T>, times: &[T]) -> Result<PathKernel<T>> {
    if times.len() < 3 {
        return Err(KdError::InvalidParameter(format!(
            "a path needs at least 3 times, got {}",
            times.len()
        )));
    }
    let d = base.dim();
    let bases = times
        .iter()
        .map(|&t| timed_basis(base, h, t).map(TimedBasis::into_basis))
        .collect::<Result<Vec<_>>>()?;
    let mut chain = conditional_kernel(&bases[2], &bases[0], &bases[1])?.values().to_vec();
    for k in 3..times.len() {
        let step = conditional_kernel(&bases[k], &bases[0], &bases[k - 1])?;
        let mut next = vec![Complex::new(T::zero(), T::zero()); d * d * d];
        for ak in 0..d {
            for a1 in 0..d {
                for a2 in 0..d {
                    next[(ak * d + a1) * d + a2] = (0..d).fold(Complex::new(T::zero(), T::zero()), |s, prev| {
                        s + step.value(ak, a1, prev) * chain[(prev * d + a1) * d + a2]
                    });
                }
            }
        }
        chain = next;
    }
    Ok(PathKernel {
        times: times.to_vec(),
        base: base.clone(),
        hamiltonian: h.clone(),
        values: chain,
    })
}

/// Single-step kernel `p(a_n|a_1,a_2)` with bases at `(t_n, t_1, t_2)`.
pub fn direct_path_kernel<T: Real>(
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    t1: T,
    t2: T,
    tn: T,
) -> Result<ConditionalKernel<T>> {
    let at = |t| timed_basis(base, h, t).map(TimedBasis::into_basis);
    conditional_kernel(&at(tn)?, &at(t1)?, &at(t2)?)
}

/// Finite-difference check of the equation of motion of
/// `q(a′,t) = ⟨a′|a(t)⟩⟨a(t)|n⟩`, here with the outcome state itself evolved,
/// `|a(t)⟩ = U(t)|a⟩`:
///
/// `dq(a′)/dt = −i Σ_{a″} ⟨a′|(H − E_n)|a″⟩ q(a″)`.
///
/// `n` indexes the eigenvectors of `H` in ascending energy order. Returns the
/// largest component residual between a central difference of step `dt`
/// and the right-hand side at `t`.
pub fn schrodinger_conditional_check<T: Real>(
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    n: usize,
    a: usize,
    t: T,
    dt: T,
) -> Result<T> {
    let d = base.dim();
    ensure_dim(d, h.dim())?;
    checked_index(n, d, "energy")?;
    checked_index(a, d, "a")?;
    if !(dt > T::zero() && dt <= T::lit(1e-2)) {
        return Err(KdError::InvalidParameter(format!("dt must lie in (0, 1e-2], got {dt}")));
    }
    let eig = h.eigen();
    let energy = eig.values[n];
    let ket_n = eig.vectors[n].amplitudes();
    let ket_a = base.state(a).amplitudes();
    let an = dot(ket_a, ket_n);
    if an.norm() < T::overlap_eta() {
        return Err(KdError::NearOrthogonalOverlap {
            a,
            b: n,
            modulus: an.norm().to_f64_lossy(),
        });
    }
    let q = |time: T| -> Vec<Complex<T>> {
        let a_t = propagator(h, time).apply_raw(ket_a);
        let at_n = dot(&a_t, ket_n);
        base.states().iter().map(|s| dot(s.amplitudes(), &a_t) * at_n).collect()
    };
    let now = q(t);
    let two_dt = dt + dt;
    let lhs: Vec<Complex<T>> = q(t + dt).iter().zip(q(t - dt)).map(|(p, m)| (p - m) / two_dt).collect();

    // (H − E_n) in the A basis
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut residual = T::zero();
    for (i, s_i) in base.states().iter().enumerate() {
        let mut rhs = Complex::new(T::zero(), T::zero());
        for (j, s_j) in base.states().iter().enumerate() {
            let mut hij = h.matrix_element_raw(s_i.amplitudes(), s_j.amplitudes());
            if i == j {
                hij -= Complex::new(energy, T::zero());
            }
            rhs += hij * now[j];
        }
        residual = residual.max((lhs[i] - minus_i * rhs).norm());
    }
    Ok(residual)
}

/// `d⟨a|ρ̂|a⟩/dt = Σ_n 2E_n Im ρ(E_n, a)` with `ρ(E_n, a) = ⟨a|n⟩⟨n|ρ̂|a⟩`.
pub fn rate_via_imaginary_energy<T: Real>(
    rho: &DensityOperator<T>,
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    a: usize,
) -> Result<T> {
    let d = base.dim();
    ensure_dim(d, rho.dim())?;
    ensure_dim(d, h.dim())?;
    checked_index(a, d, "a")?;
    let eig = h.eigen();
    let ket_a = base.state(a).amplitudes();
    let rho_a = rho.apply_raw(ket_a);
    let two = T::lit(2.0);
    Ok(eig
        .values
        .iter()
        .zip(&eig.vectors)
        .map(|(&e, n)| two * e * (dot(ket_a, n.amplitudes()) * dot(n.amplitudes(), &rho_a)).im)
        .sum())
}

/// `−i(⟨a|Ĥρ̂|a⟩ − ⟨a|ρ̂Ĥ|a⟩)`, the rate from the von Neumann equation.
pub fn commutator_rate<T: Real>(
    rho: &DensityOperator<T>,
    base: &Basis<T>,
    h: &HermitianOperator<T>,
    a: usize,
) -> Result<T> {
    let d = base.dim();
    ensure_dim(d, rho.dim())?;
    ensure_dim(d, h.dim())?;
    checked_index(a, d, "a")?;
    let ket_a = base.state(a).amplitudes();
    let hr = h.matmul(rho)?;
    let rh = rho.matmul(h)?;
    let z = hr.matrix_element_raw(ket_a, ket_a) - rh.matrix_element_raw(ket_a, ket_a);
    Ok((Complex::new(T::zero(), -T::one()) * z).re)
}
