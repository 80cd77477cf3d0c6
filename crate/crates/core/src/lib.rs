//! Kirkwood–Dirac quasiprobabilities on finite-dimensional Hilbert spaces:
//! distributions and their inversion, conditional kernels and the
//! determinism identity, a Gaussian classical-limit model, time-resolved
//! distributions, and a seeded weak-measurement simulator.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the
//! `*64`/`*32` aliases below fix the common choices.

pub mod climit;
pub mod determinism;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod kd;
pub mod random;
pub mod scalar;
pub mod weaksim;

pub use error::{KdError, Result};
pub use hilbert::{
    computational_basis, evolve, fourier_basis, inner, propagator, sigma_x, sigma_y, sigma_z, Basis,
    DensityOperator, Evolve, HermitianEigen, HermitianOperator, Operator, StateVector,
};
pub use kd::{
    expectation, kd_distribution, lambda_operator, reconstruct_density, reconstruct_operator, require_overlaps, weak_value,
    weak_value_table, KdDistribution, LambdaOperator, WeakValueTable,
};
pub use scalar::{Complex, Real};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type HermitianOperator64 = HermitianOperator<f64>;
pub type HermitianOperator32 = HermitianOperator<f32>;
pub type DensityOperator64 = DensityOperator<f64>;
pub type DensityOperator32 = DensityOperator<f32>;
pub type Basis64 = Basis<f64>;
pub type Basis32 = Basis<f32>;
pub type KdDistribution64 = KdDistribution<f64>;
pub type KdDistribution32 = KdDistribution<f32>;
pub type ConditionalKernel64 = determinism::ConditionalKernel<f64>;
pub type ConditionalKernel32 = determinism::ConditionalKernel<f32>;
