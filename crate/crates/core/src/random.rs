//! Seeded random states, bases and operators for tests, examples and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{dot, norm_sqr, Basis, DensityOperator, HermitianOperator, Operator, StateVector};
use crate::scalar::{Complex, Real};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

fn gaussian_vec<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..d).map(|_| gaussian_complex(rng)).collect()
}

/// Haar-distributed pure state.
pub fn random_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector<T> {
    let v = gaussian_vec::<T, R>(d, rng);
    let n = norm_sqr(&v).sqrt();
    StateVector::from_raw(v.into_iter().map(|z| z / n).collect())
}

/// Haar-random unitary, built column by column with Gram–Schmidt.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Operator<T> {
    let cols = orthonormal_columns(d, rng);
    Operator::from_fn(d, |i, j| cols[j][i])
}

fn orthonormal_columns<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Vec<Complex<T>>> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vec::<T, R>(d, rng);
        for _ in 0..2 {
            for q in &cols {
                let p = dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        if n > T::lit(1e-3) {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    cols
}

pub fn random_basis<T: Real, R: Rng + ?Sized>(label: impl Into<String>, d: usize, rng: &mut R) -> Basis<T> {
    let states = orthonormal_columns(d, rng).into_iter().map(StateVector::from_raw).collect();
    Basis::from_raw(label, states)
}

/// Random full-rank density operator `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator<T> {
    let g = Operator::<T>::from_fn(d, |_, _| gaussian_complex(rng));
    let gg = g.matmul_unchecked(&g.adjoint());
    let tr = gg.trace().re;
    let rho = gg.scale(Complex::new(tr.recip(), T::zero()));
    // symmetrize away rounding so the result is exactly Hermitian
    let herm = Operator::from_fn(d, |i, j| (rho.get(i, j) + rho.get(j, i).conj()) * T::lit(0.5));
    DensityOperator::new_unchecked(herm)
}

/// GUE-like Hermitian operator with unit-variance entries.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let g = Operator::<T>::from_fn(d, |_, _| gaussian_complex(rng));
    HermitianOperator::from_raw(Operator::from_fn(d, |i, j| (g.get(i, j) + g.get(j, i).conj()) * T::lit(0.5)))
}
