//! Simulated weak measurement of the projector `|a⟩⟨a|` with a Gaussian
//! position pointer, followed by post-selection on `|b⟩`.
//!
//! The coupling `exp(−i g |a⟩⟨a| ⊗ P̂)` shifts the pointer by `g` on the `a`
//! branch and is applied exactly on a periodic grid by an FFT. To first
//! order in `g` the post-selected pointer moves by `⟨x⟩ = g Re W` and
//! `⟨p⟩ = 2g Var_p Im W`, where `W = ⟨b|a⟩⟨a|ρ̂|b⟩ / ⟨b|ρ̂|b⟩`; inverting
//! these and multiplying by `⟨b|ρ̂|b⟩` estimates `ρ(a,b)`.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::{Basis, DensityOperator};
use crate::kd::{checked_overlaps, KdDistribution};
use crate::scalar::{Complex, Real};

/// Post-selection probabilities below this are rejected.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-12;
/// Smallest sample count accepted by [`sample_weak_records`].
pub const MIN_SAMPLES: usize = 1000;

/// Pointer wavefunction setup: periodic position grid `x_k = (k − N/2)·step`,
/// initial width (position standard deviation) and coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerSpec<T: Real> {
    pub width: T,
    pub coupling: T,
    pub step: T,
    pub points: usize,
}

impl<T: Real> PointerSpec<T> {
    /// Requires `step ≤ width/8` and a half-span of at least `8·width + |g|`.
    pub fn new(width: T, coupling: T, step: T, points: usize) -> Result<Self> {
        if width.is_nan() || width <= T::zero() || width.is_infinite() {
            return Err(KdError::InvalidParameter(format!("pointer width must be positive, got {width}")));
        }
        if !coupling.is_finite() || coupling == T::zero() {
            return Err(KdError::InvalidParameter(format!("coupling must be finite and nonzero, got {coupling}")));
        }
        if step.is_nan() || step <= T::zero() || step > width / T::lit(8.0) {
            return Err(KdError::GridTooCoarse(format!("pointer step {step} exceeds width/8")));
        }
        let spec = Self {
            width,
            coupling,
            step,
            points,
        };
        let need = T::lit(8.0) * width + coupling.abs();
        if spec.half_span() < need {
            return Err(KdError::GridTooCoarse(format!(
                "pointer grid half-span {} below {need}",
                spec.half_span()
            )));
        }
        Ok(spec)
    }

    /// Step `width/16`, smallest power-of-two grid covering `±(12·width + |g|)`.
    pub fn standard(width: T, coupling: T) -> Result<Self> {
        let step = width / T::lit(16.0);
        let half = T::lit(12.0) * width + coupling.abs();
        let points = (T::lit(2.0) * half / step).ceil().to_usize().unwrap_or(0).next_power_of_two();
        Self::new(width, coupling, step, points)
    }

    pub fn half_span(&self) -> T {
        self.step * T::from_usize(self.points / 2).unwrap()
    }

    pub fn position(&self, k: usize) -> T {
        (T::from_usize(k).unwrap() - T::from_usize(self.points / 2).unwrap()) * self.step
    }

    /// Angular wavenumber of FFT bin `k`.
    pub fn momentum(&self, k: usize) -> T {
        let n = self.points;
        let signed = if k < n.div_ceil(2) {
            T::from_usize(k).unwrap()
        } else {
            -T::from_usize(n - k).unwrap()
        };
        T::TAU() * signed / (T::from_usize(n).unwrap() * self.step)
    }

    /// `1/(4·width²)`.
    pub fn momentum_variance(&self) -> T {
        (T::lit(4.0) * self.width * self.width).recip()
    }
}

/// Estimated KD values, row-major `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakEstimate<T: Real> {
    pub basis_a: Basis<T>,
    pub basis_b: Basis<T>,
    pub coupling: T,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> WeakEstimate<T> {
    pub fn dim(&self) -> usize {
        self.basis_a.dim()
    }

    pub fn value(&self, a: usize, b: usize) -> Complex<T> {
        self.values[a * self.dim() + b]
    }

    /// Largest entrywise modulus error against reference values.
    pub fn max_abs_error(&self, kd: &KdDistribution<T>) -> Result<T> {
        ensure_dim(self.values.len(), kd.values().len())?;
        Ok(self
            .values
            .iter()
            .zip(kd.values())
            .map(|(x, y)| (x - y).norm())
            .fold(T::zero(), T::max))
    }
}

/// Monte Carlo estimate with per-entry standard errors of the real and
/// imaginary parts (stored as `re + i·im`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeakEstimate<T: Real> {
    pub estimate: WeakEstimate<T>,
    pub stderr: Vec<Complex<T>>,
    pub samples: usize,
    pub seed: u64,
}

/// Post-selected pointer densities for one `(a, b)` cell.
struct CellDensities {
    position: Vec<f64>,
    momentum: Vec<f64>,
}

struct Pointer<T: Real> {
    spec: PointerSpec<T>,
    /// unshifted and shifted wavefunctions, position and momentum space
    x: [Vec<Complex<T>>; 2],
    p: [Vec<Complex<T>>; 2],
}

impl<T: Real> Pointer<T> {
    fn new(spec: PointerSpec<T>) -> Self {
        let n = spec.points;
        let mut planner = FftPlanner::<T>::new();
        let fwd: Arc<dyn Fft<T>> = planner.plan_fft_forward(n);
        let inv: Arc<dyn Fft<T>> = planner.plan_fft_inverse(n);

        let four_w2 = T::lit(4.0) * spec.width * spec.width;
        let mut phi: Vec<Complex<T>> = (0..n)
            .map(|k| {
                let x = spec.position(k);
                Complex::new((-(x * x) / four_w2).exp(), T::zero())
            })
            .collect();
        let norm = (phi.iter().map(|z| z.norm_sqr()).sum::<T>() * spec.step).sqrt();
        for z in &mut phi {
            *z /= norm;
        }

        let mut phi_p = phi.clone();
        fwd.process(&mut phi_p);
        let mut shifted_p: Vec<Complex<T>> = phi_p
            .iter()
            .enumerate()
            .map(|(k, z)| z * Complex::from_polar(T::one(), -spec.momentum(k) * spec.coupling))
            .collect();
        let mut shifted = shifted_p.clone();
        inv.process(&mut shifted);
        let scale = T::from_usize(n).unwrap().recip();
        for z in &mut shifted {
            *z *= scale;
        }
        // keep the momentum-space copy consistent with the rounded position-space one
        shifted_p.clone_from(&shifted);
        fwd.process(&mut shifted_p);

        Self {
            spec,
            x: [phi, shifted],
            p: [phi_p, shifted_p],
        }
    }

    /// `P(x) = Σ_ij c_ij φ_i(x) φ_j*(x)` and its momentum analogue, with
    /// `c_ij = ⟨b|P_i ρ̂ P_j|b⟩`, `P_1 = |a⟩⟨a|`, `P_0 = 1 − P_1`.
    fn densities(&self, coef: &[[Complex<T>; 2]; 2]) -> CellDensities {
        let density = |waves: &[Vec<Complex<T>>; 2]| -> Vec<f64> {
            (0..self.spec.points)
                .map(|k| {
                    let mut s = Complex::new(T::zero(), T::zero());
                    for (i, ci) in coef.iter().enumerate() {
                        for (j, cij) in ci.iter().enumerate() {
                            s += cij * waves[i][k] * waves[j][k].conj();
                        }
                    }
                    s.re.to_f64_lossy().max(0.0)
                })
                .collect()
        };
        CellDensities {
            position: density(&self.x),
            momentum: density(&self.p),
        }
    }
}

struct Cell<T: Real> {
    densities: CellDensities,
    born_b: T,
}

fn cells<T: Real>(
    rho: &DensityOperator<T>,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
    pointer: &Pointer<T>,
) -> Result<Vec<Cell<T>>> {
    let d = basis_a.dim();
    ensure_dim(d, rho.dim())?;
    let overlaps = checked_overlaps(basis_a, basis_b)?;
    for b in 0..d {
        let p = rho.born(basis_b.state(b))?;
        if p.to_f64_lossy() < MIN_POSTSELECTION_PROBABILITY {
            return Err(KdError::PostSelectionImpossible {
                b,
                probability: p.to_f64_lossy(),
            });
        }
    }
    (0..d * d)
        .into_par_iter()
        .map(|cell| {
            let (a, b) = (cell / d, cell % d);
            let ket_a = basis_a.state(a).amplitudes();
            let ket_b = basis_b.state(b).amplitudes();
            // bras ⟨b|P_1 = ⟨b|a⟩⟨a| and ⟨b|P_0 = ⟨b| − ⟨b|P_1, as conjugated kets
            let ba = overlaps[a * d + b];
            let r1: Vec<Complex<T>> = ket_a.iter().map(|x| x * ba.conj()).collect();
            let r0: Vec<Complex<T>> = ket_b.iter().zip(&r1).map(|(x, y)| x - y).collect();
            let rows = [r0, r1];
            let mut coef = [[Complex::new(T::zero(), T::zero()); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    coef[i][j] = rho.matrix_element_raw(&rows[i], &rows[j]);
                }
            }
            Ok(Cell {
                densities: pointer.densities(&coef),
                born_b: rho.born(basis_b.state(b))?,
            })
        })
        .collect()
}

fn invert<T: Real>(spec: &PointerSpec<T>, mean_x: f64, mean_p: f64, born_b: T) -> Complex<T> {
    let g = spec.coupling.to_f64_lossy();
    let var_p = spec.momentum_variance().to_f64_lossy();
    let born = born_b.to_f64_lossy();
    Complex::new(T::lit(mean_x / g * born), T::lit(mean_p / (2.0 * g * var_p) * born))
}

fn weighted_mean(values: impl Iterator<Item = f64>, weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    values.zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
}

/// Exact (noise-free) pointer readout for every `(a, b)`.
pub fn weak_estimate_kd<T: Real>(
    rho: &DensityOperator<T>,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
    spec: &PointerSpec<T>,
) -> Result<WeakEstimate<T>> {
    let pointer = Pointer::new(*spec);
    let values = cells(rho, basis_a, basis_b, &pointer)?
        .iter()
        .map(|cell| {
            let mx = weighted_mean((0..spec.points).map(|k| spec.position(k).to_f64_lossy()), &cell.densities.position);
            let mp = weighted_mean((0..spec.points).map(|k| spec.momentum(k).to_f64_lossy()), &cell.densities.momentum);
            invert(spec, mx, mp, cell.born_b)
        })
        .collect();
    Ok(WeakEstimate {
        basis_a: basis_a.clone(),
        basis_b: basis_b.clone(),
        coupling: spec.coupling,
        values,
    })
}

fn sample_moments(rng: &mut ChaCha8Rng, values: &[f64], weights: &[f64], n: usize) -> Result<(f64, f64)> {
    let dist = WeightedIndex::new(weights)
        .map_err(|e| KdError::InvalidParameter(format!("pointer distribution unusable: {e}")))?;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let v = values[dist.sample(rng)];
        sum += v;
        sum_sq += v * v;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Draws `n` post-selected position readings and `n` momentum readings per
/// cell from the exact pointer distributions. Cell `i = a·d + b` uses the
/// ChaCha8 stream `i` of `seed`, so results do not depend on thread count.
pub fn sample_weak_records<T: Real>(
    rho: &DensityOperator<T>,
    basis_a: &Basis<T>,
    basis_b: &Basis<T>,
    spec: &PointerSpec<T>,
    n: usize,
    seed: u64,
) -> Result<SampledWeakEstimate<T>> {
    if n < MIN_SAMPLES {
        return Err(KdError::InsufficientSamples {
            found: n,
            min: MIN_SAMPLES,
        });
    }
    let pointer = Pointer::new(*spec);
    let xs: Vec<f64> = (0..spec.points).map(|k| spec.position(k).to_f64_lossy()).collect();
    let ps: Vec<f64> = (0..spec.points).map(|k| spec.momentum(k).to_f64_lossy()).collect();
    let g = spec.coupling.to_f64_lossy().abs();
    let var_p = spec.momentum_variance().to_f64_lossy();

    let results = cells(rho, basis_a, basis_b, &pointer)?
        .into_par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mx, sx) = sample_moments(&mut rng, &xs, &cell.densities.position, n)?;
            let (mp, sp) = sample_moments(&mut rng, &ps, &cell.densities.momentum, n)?;
            let born = cell.born_b.to_f64_lossy();
            let err = Complex::new(T::lit(sx / g * born), T::lit(sp / (2.0 * g * var_p) * born));
            Ok((invert(spec, mx, mp, cell.born_b), err))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, stderr) = results.into_iter().unzip();
    Ok(SampledWeakEstimate {
        estimate: WeakEstimate {
            basis_a: basis_a.clone(),
            basis_b: basis_b.clone(),
            coupling: spec.coupling,
            values,
        },
        stderr,
        samples: n,
        seed,
    })
}
