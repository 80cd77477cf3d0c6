//! Complex conditional probabilities `p(c|a,b) = ⟨b|c⟩⟨c|a⟩/⟨b|a⟩` and the
//! changes of representation they generate.

use rayon::prelude::*;

use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::{dot, ensure_same_basis, Basis};
use crate::kd::{checked_index, checked_overlaps, KdDistribution};
use crate::scalar::{Complex, Real};

/// Dense `d×d×d` tensor of `p(c|a,b)`, stored with index `(c·d + a)·d + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalKernel<T: Real> {
    basis_c: Basis<T>,
    basis_a: Basis<T>,
    basis_b: Basis<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ConditionalKernel<T> {
    pub fn basis_c(&self) -> &Basis<T> {
        &self.basis_c
    }

    pub fn basis_a(&self) -> &Basis<T> {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &Basis<T> {
        &self.basis_b
    }

    pub fn dim(&self) -> usize {
        self.basis_c.dim()
    }

    pub fn value(&self, c: usize, a: usize, b: usize) -> Complex<T> {
        let d = self.dim();
        self.values[(c * d + a) * d + b]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// `max_{a,b} |Σ_c p(c|a,b) − 1|`.
    pub fn completeness_deviation(&self) -> T {
        let d = self.dim();
        let mut dev = T::zero();
        for a in 0..d {
            for b in 0..d {
                let s = (0..d).fold(Complex::new(T::zero(), T::zero()), |s, c| s + self.value(c, a, b));
                dev = dev.max((s - Complex::new(T::one(), T::zero())).norm());
            }
        }
        dev
    }
}

pub fn conditional_kernel<T: Real>(
    basis_c: &Basis<T>,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
) -> Result<ConditionalKernel<T>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_c.dim())?;
    let ba = checked_overlaps(basis_a, basis_b)?;
    // ⟨c|a⟩ at [c·d + a], ⟨b|c⟩ at [c·d + b]
    let ca = basis_c.overlaps(basis_a)?;
    let bc: Vec<Complex<T>> = basis_c.overlaps(basis_b)?.into_iter().map(|z| z.conj()).collect();
    let mut values = vec![Complex::new(T::zero(), T::zero()); d * d * d];
    values.par_chunks_mut(d * d).enumerate().for_each(|(c, slab)| {
        for a in 0..d {
            for b in 0..d {
                slab[a * d + b] = bc[c * d + b] * ca[c * d + a] / ba[a * d + b];
            }
        }
    });
    Ok(ConditionalKernel {
        basis_c: basis_c.clone(),
        basis_a: basis_a.clone(),
        basis_b: basis_b.clone(),
        values,
    })
}

/// Replaces the first slot: `ρ(c,b) = Σ_a p(c|a,b) ρ(a,b)`, giving a
/// distribution over `(C, B)`.
pub fn transform_kd<T: Real>(kd: &KdDistribution<T>, kernel: &ConditionalKernel<T>) -> Result<KdDistribution<T>> {
    ensure_same_basis(kernel.basis_a(), kd.basis_a(), "first slot")?;
    ensure_same_basis(kernel.basis_b(), kd.basis_b(), "second slot")?;
    let d = kd.dim();
    let mut values = Vec::with_capacity(d * d);
    for c in 0..d {
        for b in 0..d {
            values.push((0..d).fold(Complex::new(T::zero(), T::zero()), |s, a| {
                s + kernel.value(c, a, b) * kd.value(a, b)
            }));
        }
    }
    Ok(KdDistribution::from_raw(kernel.basis_c().clone(), kd.basis_b().clone(), values))
}

/// Replaces the second slot: `ρ(a,c) = Σ_b p(c|a,b) ρ(a,b)`, giving a
/// distribution over `(A, C)`.
pub fn transform_kd_second<T: Real>(
    kd: &KdDistribution<T>,
    kernel: &ConditionalKernel<T>,
) -> Result<KdDistribution<T>> {
    ensure_same_basis(kernel.basis_a(), kd.basis_a(), "first slot")?;
    ensure_same_basis(kernel.basis_b(), kd.basis_b(), "second slot")?;
    let d = kd.dim();
    let mut values = Vec::with_capacity(d * d);
    for a in 0..d {
        for c in 0..d {
            values.push((0..d).fold(Complex::new(T::zero(), T::zero()), |s, b| {
                s + kernel.value(c, a, b) * kd.value(a, b)
            }));
        }
    }
    Ok(KdDistribution::from_raw(kd.basis_a().clone(), kernel.basis_c().clone(), values))
}

/// `max_{a,a′,b} |Σ_c p(a′|c,b) p(c|a,b) − δ_{a,a′}|`.
pub fn verify_determinism<T: Real>(basis_a: &Basis<T>, basis_b: &Basis<T>, basis_c: &Basis<T>) -> Result<T> {
    let forward = conditional_kernel(basis_c, basis_a, basis_b)?;
    let back = conditional_kernel(basis_a, basis_c, basis_b)?;
    let d = basis_a.dim();
    let dev = (0..d)
        .into_par_iter()
        .map(|b| {
            let mut dev = T::zero();
            for a in 0..d {
                for a2 in 0..d {
                    let s = (0..d).fold(Complex::new(T::zero(), T::zero()), |s, c| {
                        s + back.value(a2, c, b) * forward.value(c, a, b)
                    });
                    let target = if a == a2 { T::one() } else { T::zero() };
                    dev = dev.max((s - Complex::new(target, T::zero())).norm());
                }
            }
            dev
        })
        .reduce(T::zero, T::max);
    Ok(dev)
}

fn overlap_checked<T: Real>(bra: &Basis<T>, i: usize, ket: &Basis<T>, j: usize) -> Result<Complex<T>> {
    let ov = dot(bra.state(i).amplitudes(), ket.state(j).amplitudes());
    if ov.norm() < T::overlap_eta() {
        return Err(KdError::NearOrthogonalOverlap {
            a: j,
            b: i,
            modulus: ov.norm().to_f64_lossy(),
        });
    }
    Ok(ov)
}

/// The `d` summands `p(a′|c,b) p(c|a,b)` of the determinism sum, one per `c`.
pub fn product_terms<T: Real>(
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
    basis_c: &Basis<T>,
    a: usize,
    a_prime: usize,
    b: usize,
) -> Result<Vec<Complex<T>>> {
    let d = basis_a.dim();
    ensure_dim(d, basis_b.dim())?;
    ensure_dim(d, basis_c.dim())?;
    checked_index(a, d, "a")?;
    checked_index(a_prime, d, "a'")?;
    checked_index(b, d, "b")?;
    let ba = overlap_checked(basis_b, b, basis_a, a)?;
    let ket_a = basis_a.state(a).amplitudes();
    let ket_a2 = basis_a.state(a_prime).amplitudes();
    let ket_b = basis_b.state(b).amplitudes();
    (0..d)
        .map(|c| {
            let ket_c = basis_c.state(c).amplitudes();
            let bc = overlap_checked(basis_b, b, basis_c, c)?;
            let forward = dot(ket_b, ket_c) * dot(ket_c, ket_a) / ba;
            let back = dot(ket_b, ket_a2) * dot(ket_a2, ket_c) / bc;
            Ok(back * forward)
        })
        .collect()
}
