//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Output is canonical so that downstream tables (for instance KD
//! distributions over an energy eigenbasis) are reproducible:
//!
//! * eigenvalues ascending;
//! * inside a degenerate block, the eigenvectors are the Gram–Schmidt
//!   orthonormalization of the block projector applied to `|0⟩, |1⟩, …` in
//!   index order;
//! * a non-degenerate eigenvector has its first component of modulus at least
//!   half the largest modulus made real and positive.

use crate::hilbert::operator::Operator;
use crate::hilbert::state::{dot, norm_sqr, StateVector};
use crate::scalar::{Complex, Real};

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Vec<StateVector<T>>,
}

impl<T: Real> HermitianEigen<T> {
    /// `Σ_n f(λ_n) |n⟩⟨n|`.
    pub fn map(&self, f: impl Fn(T) -> Complex<T>) -> Operator<T> {
        let d = self.values.len();
        let mut data = vec![Complex::new(T::zero(), T::zero()); d * d];
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            let amps = v.amplitudes();
            for i in 0..d {
                let wi = w * amps[i];
                for j in 0..d {
                    data[i * d + j] += wi * amps[j].conj();
                }
            }
        }
        Operator::from_fn(d, |i, j| data[i * d + j])
    }

    pub fn reconstruct(&self) -> Operator<T> {
        self.map(|l| Complex::new(l, T::zero()))
    }
}

pub(crate) fn hermitian_eigen<T: Real>(op: &Operator<T>) -> HermitianEigen<T> {
    let d = op.dim();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let half = T::lit(0.5);

    // Work on the Hermitian part so tiny asymmetries cannot stall the sweeps.
    let mut a: Vec<Complex<T>> = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            (op.get(i, j) + op.get(j, i).conj()) * half
        })
        .collect();
    let mut v: Vec<Complex<T>> = (0..d * d).map(|k| if k / d == k % d { one } else { zero }).collect();

    let scale = norm_sqr(&a).sqrt();
    if scale > T::zero() {
        let skip = T::epsilon() * scale / T::from_usize(d.max(1)).unwrap();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[p * d + q];
                    let mag = apq.norm();
                    if mag <= skip {
                        continue;
                    }
                    rotated = true;
                    let phase = apq / mag;
                    let app = a[p * d + p].re;
                    let aqq = a[q * d + q].re;
                    let theta = (aqq - app) / (mag + mag);
                    let t = if theta == T::zero() {
                        T::one()
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                    };
                    let cs = T::one() / (t * t + T::one()).sqrt();
                    let sn = t * cs;
                    let jpp = Complex::new(cs, T::zero());
                    let jpq = Complex::new(sn, T::zero());
                    let jqp = phase.conj() * (-sn);
                    let jqq = phase.conj() * cs;

                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = akp * jpp + akq * jqp;
                        a[k * d + q] = akp * jpq + akq * jqq;
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = vkp * jpp + vkq * jqp;
                        v[k * d + q] = vkp * jpq + vkq * jqq;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[q * d + k] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[p * d + q] = zero;
                    a[q * d + p] = zero;
                    a[p * d + p] = Complex::new(a[p * d + p].re, T::zero());
                    a[q * d + q] = Complex::new(a[q * d + q].re, T::zero());
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i * d + i].re.partial_cmp(&a[j * d + j].re).unwrap());
    let values: Vec<T> = order.iter().map(|&i| a[i * d + i].re).collect();
    let columns: Vec<Vec<Complex<T>>> = order
        .iter()
        .map(|&j| (0..d).map(|i| v[i * d + j]).collect())
        .collect();

    let vectors = canonicalize(&values, columns);
    HermitianEigen { values, vectors }
}

fn canonicalize<T: Real>(values: &[T], columns: Vec<Vec<Complex<T>>>) -> Vec<StateVector<T>> {
    let d = values.len();
    let max_abs = values.iter().fold(T::one(), |m, x| m.max(x.abs()));
    let group_tol = T::epsilon().sqrt() * max_abs;

    let mut out = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end] - values[end - 1] <= group_tol {
            end += 1;
        }
        if end - start == 1 {
            out.push(StateVector::from_raw(fix_phase(columns[start].clone())));
        } else {
            out.extend(block_basis(&columns[start..end]).into_iter().map(StateVector::from_raw));
        }
        start = end;
    }
    out
}

fn fix_phase<T: Real>(mut v: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let max = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let half = max * T::lit(0.5);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= half).copied() {
        let phase = pivot.conj() / pivot.norm();
        let norm = norm_sqr(&v).sqrt();
        for z in &mut v {
            *z = *z * phase / norm;
        }
    }
    v
}

/// Orthonormal basis of the span of `block`, built from the projections of
/// the computational unit vectors taken in index order.
fn block_basis<T: Real>(block: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
    let d = block[0].len();
    let k = block.len();
    let accept = T::lit(1e-3);
    let mut chosen: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    for j in 0..d {
        if chosen.len() == k {
            break;
        }
        // P e_j = Σ_v v conj(v_j)
        let mut w = vec![Complex::new(T::zero(), T::zero()); d];
        for col in block {
            let coef = col[j].conj();
            for (wi, ci) in w.iter_mut().zip(col) {
                *wi += ci * coef;
            }
        }
        for _ in 0..2 {
            for u in &chosen {
                let proj = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * proj;
                }
            }
        }
        let norm = norm_sqr(&w).sqrt();
        if norm > accept {
            chosen.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    chosen
}
