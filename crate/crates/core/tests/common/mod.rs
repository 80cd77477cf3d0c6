//! Reference computations written independently of the library internals:
//! plain nested-loop formulas and a Taylor-series matrix exponential.
#![allow(dead_code)]

use kdq::random::random_basis;
use kdq::{Basis64, DensityOperator64, HermitianOperator64, Operator64, StateVector64, C64};
use rand::Rng;

pub type Mat = Vec<Vec<C64>>;

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn to_mat(op: &Operator64) -> Mat {
    let d = op.dim();
    (0..d).map(|i| (0..d).map(|j| op.get(i, j)).collect()).collect()
}

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { C64::new(1.0, 0.0) } else { zero() }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn adjoint(a: &Mat) -> Mat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn apply(a: &Mat, v: &[C64]) -> Vec<C64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `⟨u|v⟩`.
pub fn braket(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨u|M|v⟩`.
pub fn sandwich(u: &[C64], m: &Mat, v: &[C64]) -> C64 {
    braket(u, &apply(m, v))
}

pub fn trace(a: &Mat) -> C64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `exp(−iHt)` by scaling and squaring a 24-term Taylor series.
pub fn expm_minus_i(h: &Mat, t: f64) -> Mat {
    let d = h.len();
    let norm: f64 = h.iter().flatten().map(|z| z.norm()).sum::<f64>() * t.abs();
    let squarings = (norm / 0.25).log2().ceil().max(0.0) as u32;
    let scale = t / 2f64.powi(squarings as i32);
    let x: Mat = h.iter().map(|r| r.iter().map(|z| C64::new(0.0, -scale) * z).collect()).collect();
    let mut out = identity(d);
    let mut term = identity(d);
    for k in 1..=24 {
        term = matmul(&term, &x);
        let f = 1.0 / k as f64;
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z *= f;
            }
        }
        for i in 0..d {
            for j in 0..d {
                out[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        out = matmul(&out, &out);
    }
    out
}

/// States `exp(+iHt)|a⟩` of a basis, as plain vectors.
pub fn timed_states(basis: &Basis64, h: &HermitianOperator64, t: f64) -> Vec<Vec<C64>> {
    let u_dag = expm_minus_i(&to_mat(h.as_operator()), -t);
    basis.states().iter().map(|s| apply(&u_dag, s.amplitudes())).collect()
}

pub fn states_of(basis: &Basis64) -> Vec<Vec<C64>> {
    basis.states().iter().map(|s| s.amplitudes().to_vec()).collect()
}

/// `⟨b|a⟩⟨a|ρ|b⟩`, row-major `(a, b)`.
pub fn kd_oracle(rho: &DensityOperator64, a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<C64> {
    let r = to_mat(rho.as_operator());
    let mut out = Vec::new();
    for ka in a {
        for kb in b {
            out.push(braket(kb, ka) * sandwich(ka, &r, kb));
        }
    }
    out
}

/// `⟨b|c⟩⟨c|a⟩/⟨b|a⟩` indexed `(c·d + a)·d + b`.
pub fn kernel_oracle(c: &[Vec<C64>], a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<C64> {
    let mut out = Vec::new();
    for kc in c {
        for ka in a {
            for kb in b {
                out.push(braket(kb, kc) * braket(kc, ka) / braket(kb, ka));
            }
        }
    }
    out
}

pub fn max_vec_diff(x: &[C64], y: &[C64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

pub fn min_overlap(a: &Basis64, b: &Basis64) -> f64 {
    let mut m = f64::INFINITY;
    for x in a.states() {
        for y in b.states() {
            m = m.min(braket(x.amplitudes(), y.amplitudes()).norm());
        }
    }
    m
}

/// Random basis pair whose overlaps all have modulus at least `floor`.
pub fn basis_pair<R: Rng>(d: usize, floor: f64, rng: &mut R) -> (Basis64, Basis64) {
    loop {
        let a = random_basis("A", d, rng);
        let b = random_basis("B", d, rng);
        if min_overlap(&a, &b) >= floor {
            return (a, b);
        }
    }
}

pub fn chirp_state(d: usize) -> StateVector64 {
    let amps = (0..d)
        .map(|a| C64::from_polar(1.0 / (d as f64).sqrt(), std::f64::consts::PI * (a * a) as f64 / d as f64))
        .collect();
    StateVector64::new(amps).unwrap()
}
