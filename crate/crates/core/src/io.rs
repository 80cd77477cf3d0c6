//! JSON and CSV forms of states, operators, bases and results.
//!
//! Complex numbers are `[re, im]` in JSON and two columns in CSV; operators
//! are arrays of rows; bases are `{"label": ..., "states": [...]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::climit::Figure1Panel;
use crate::determinism::ConditionalKernel;
use crate::error::KdError;
use crate::hilbert::{Basis, DensityOperator, HermitianOperator, Operator, StateVector};
use crate::kd::KdDistribution;
use crate::scalar::{Complex, Real};
use crate::weaksim::SampledWeakEstimate;

/// Failure while reading or writing external data.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Invalid(#[from] KdError),
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Parse(_) => "PARSE",
            IoError::Io(_) => "IO",
            IoError::Invalid(e) => e.code(),
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse(e.to_string())
    }
}

impl From<csv::Error> for IoError {
    fn from(e: csv::Error) -> Self {
        IoError::Parse(e.to_string())
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl ComplexPair {
    pub fn from_complex<T: Real>(z: Complex<T>) -> Self {
        Self(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        Complex::new(T::lit(self.0), T::lit(self.1))
    }
}

fn pairs<T: Real>(v: &[Complex<T>]) -> Vec<ComplexPair> {
    v.iter().map(|&z| ComplexPair::from_complex(z)).collect()
}

fn unpair<T: Real>(v: &[ComplexPair]) -> Vec<Complex<T>> {
    v.iter().map(|p| p.to_complex()).collect()
}

fn rows_of<T: Real>(flat: &[Complex<T>], d: usize) -> Vec<Vec<ComplexPair>> {
    flat.chunks(d).map(pairs).collect()
}

fn flatten_square<T: Real>(rows: &[Vec<ComplexPair>], what: &str) -> IoResult<(usize, Vec<Complex<T>>)> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(IoError::Parse(format!("{what} must be a square array of rows")));
    }
    Ok((d, rows.iter().flat_map(|r| unpair(r)).collect()))
}

/// A state is either a ket (array of amplitudes) or a density matrix
/// (array of rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure(Vec<ComplexPair>),
    Mixed(Vec<Vec<ComplexPair>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub label: String,
    pub states: Vec<Vec<ComplexPair>>,
}

impl BasisJson {
    pub fn from_basis<T: Real>(b: &Basis<T>) -> Self {
        Self {
            label: b.label().to_string(),
            states: b.states().iter().map(|s| pairs(s.amplitudes())).collect(),
        }
    }

    pub fn to_basis<T: Real>(&self) -> IoResult<Basis<T>> {
        let states = self
            .states
            .iter()
            .map(|s| StateVector::new(unpair(s)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Basis::new(self.label.clone(), states)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdJson {
    #[serde(rename = "basisA")]
    pub basis_a: BasisJson,
    #[serde(rename = "basisB")]
    pub basis_b: BasisJson,
    pub values: Vec<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

impl KdJson {
    pub fn from_kd<T: Real>(kd: &KdDistribution<T>, metadata: Option<Value>) -> Self {
        Self {
            basis_a: BasisJson::from_basis(kd.basis_a()),
            basis_b: BasisJson::from_basis(kd.basis_b()),
            values: rows_of(kd.values(), kd.dim()),
            metadata,
        }
    }

    pub fn to_kd<T: Real>(&self) -> IoResult<KdDistribution<T>> {
        let (_, values) = flatten_square(&self.values, "KD values")?;
        Ok(KdDistribution::from_values(
            self.basis_a.to_basis()?,
            self.basis_b.to_basis()?,
            values,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelJson {
    #[serde(rename = "basisC")]
    pub basis_c: BasisJson,
    #[serde(rename = "basisA")]
    pub basis_a: BasisJson,
    #[serde(rename = "basisB")]
    pub basis_b: BasisJson,
    /// `values[c][a][b]`.
    pub values: Vec<Vec<Vec<ComplexPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

impl KernelJson {
    pub fn from_kernel<T: Real>(k: &ConditionalKernel<T>, metadata: Option<Value>) -> Self {
        Self::from_parts(k.basis_c(), k.basis_a(), k.basis_b(), k.values(), metadata)
    }

    pub fn from_parts<T: Real>(
        c: &Basis<T>,
        a: &Basis<T>,
        b: &Basis<T>,
        values: &[Complex<T>],
        metadata: Option<Value>,
    ) -> Self {
        let d = a.dim();
        Self {
            basis_c: BasisJson::from_basis(c),
            basis_a: BasisJson::from_basis(a),
            basis_b: BasisJson::from_basis(b),
            values: values.chunks(d * d).map(|slab| rows_of(slab, d)).collect(),
            metadata,
        }
    }
}

pub fn parse_state<T: Real>(text: &str) -> IoResult<DensityOperator<T>> {
    match serde_json::from_str::<StateJson>(text)? {
        StateJson::Pure(amps) => Ok(DensityOperator::from_pure(&StateVector::new(unpair(&amps))?)),
        StateJson::Mixed(rows) => {
            let (d, data) = flatten_square(&rows, "density matrix")?;
            Ok(DensityOperator::new(Operator::from_row_major(d, data)?)?)
        }
    }
}

pub fn parse_basis<T: Real>(text: &str) -> IoResult<Basis<T>> {
    serde_json::from_str::<BasisJson>(text)?.to_basis()
}

pub fn parse_operator<T: Real>(text: &str) -> IoResult<Operator<T>> {
    let rows: Vec<Vec<ComplexPair>> = serde_json::from_str(text)?;
    let (d, data) = flatten_square(&rows, "operator")?;
    Ok(Operator::from_row_major(d, data)?)
}

pub fn parse_hermitian<T: Real>(text: &str) -> IoResult<HermitianOperator<T>> {
    Ok(HermitianOperator::new(parse_operator(text)?)?)
}

pub fn parse_kd<T: Real>(text: &str) -> IoResult<KdDistribution<T>> {
    serde_json::from_str::<KdJson>(text)?.to_kd()
}

pub fn operator_to_json<T: Real>(op: &Operator<T>) -> String {
    serde_json::to_string_pretty(&rows_of(op.row_major(), op.dim())).expect("plain data serializes")
}

pub fn kd_to_json<T: Real>(kd: &KdDistribution<T>, metadata: Option<Value>) -> String {
    serde_json::to_string_pretty(&KdJson::from_kd(kd, metadata)).expect("plain data serializes")
}

pub fn kernel_to_json<T: Real>(k: &ConditionalKernel<T>, metadata: Option<Value>) -> String {
    serde_json::to_string_pretty(&KernelJson::from_kernel(k, metadata)).expect("plain data serializes")
}

/// `# key=value` lines placed ahead of a CSV header.
fn csv_preamble(metadata: &[(&str, String)]) -> String {
    metadata.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Columns `a,b,re,im`, optionally preceded by `# key=value` comment lines.
pub fn kd_to_csv<T: Real>(kd: &KdDistribution<T>, metadata: &[(&str, String)]) -> String {
    let d = kd.dim();
    let rows = (0..d * d).map(|i| {
        let z = kd.values()[i];
        vec![(i / d).to_string(), (i % d).to_string(), z.re.to_string(), z.im.to_string()]
    });
    csv_preamble(metadata) + &csv_string(&["a", "b", "re", "im"], rows)
}

/// Columns `c,a,b,re,im` for a `(c·d + a)·d + b` tensor.
pub fn kernel_values_to_csv<T: Real>(d: usize, values: &[Complex<T>], metadata: &[(&str, String)]) -> String {
    let rows = values.iter().enumerate().map(|(i, z)| {
        vec![
            (i / (d * d)).to_string(),
            (i / d % d).to_string(),
            (i % d).to_string(),
            z.re.to_string(),
            z.im.to_string(),
        ]
    });
    csv_preamble(metadata) + &csv_string(&["c", "a", "b", "re", "im"], rows)
}

pub fn kernel_to_csv<T: Real>(k: &ConditionalKernel<T>) -> String {
    kernel_values_to_csv(k.dim(), k.values(), &[])
}

/// Long format `sigma,c,re_q,im_q,classical`.
pub fn figure1_to_csv<T: Real>(panels: &[Figure1Panel<T>]) -> String {
    let rows = panels.iter().flat_map(|p| {
        p.rows.iter().map(move |r| {
            vec![
                p.sigma.to_string(),
                r.c.to_string(),
                r.re_q.to_string(),
                r.im_q.to_string(),
                r.classical.to_string(),
            ]
        })
    });
    csv_string(&["sigma", "c", "re_q", "im_q", "classical"], rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakEntryJson {
    pub a: usize,
    pub b: usize,
    pub estimate: ComplexPair,
    pub stderr: ComplexPair,
    pub g: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakReportJson {
    #[serde(rename = "basisA")]
    pub basis_a: String,
    #[serde(rename = "basisB")]
    pub basis_b: String,
    pub entries: Vec<WeakEntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

impl WeakReportJson {
    pub fn from_sampled<T: Real>(s: &SampledWeakEstimate<T>, metadata: Option<Value>) -> Self {
        let d = s.estimate.dim();
        let entries = (0..d * d)
            .map(|i| WeakEntryJson {
                a: i / d,
                b: i % d,
                estimate: ComplexPair::from_complex(s.estimate.values[i]),
                stderr: ComplexPair::from_complex(s.stderr[i]),
                g: s.estimate.coupling.to_f64_lossy(),
                n: s.samples,
                seed: s.seed,
            })
            .collect();
        Self {
            basis_a: s.estimate.basis_a.label().to_string(),
            basis_b: s.estimate.basis_b.label().to_string(),
            entries,
            metadata,
        }
    }
}
