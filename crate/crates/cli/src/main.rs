//! `kdq`: command-line access to the Kirkwood–Dirac toolkit.
//!
//! Exit status: 0 on success, 1 when a property check exceeds its
//! tolerance, 2 on invalid input. Errors go to stderr as one JSON object
//! `{"code": ..., "message": ...}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdq::climit::{
    coarse_grain_analytic, coarse_grain_numeric, discrete_im_law_residual, epsilon, figure1_data, gaussian_conditional,
    phase_space_test_state, state_count_check, CoarseGrainSpec, Figure1Panel, GaussianModel, GridOptions, UniformGrid,
};
use kdq::determinism::{conditional_kernel, transform_kd, transform_kd_second, verify_determinism};
use kdq::dynamics::{commutator_rate, direct_path_kernel, path_kernel, rate_via_imaginary_energy, two_time_kd};
use kdq::io::{
    figure1_to_csv, kd_to_csv, kd_to_json, kernel_values_to_csv, operator_to_json, parse_basis, parse_hermitian,
    parse_kd, parse_state, IoError, KernelJson, WeakReportJson,
};
use kdq::random::{random_basis, random_density, random_hermitian, seeded_rng};
use kdq::weaksim::{sample_weak_records, weak_estimate_kd, PointerSpec};
use kdq::{
    kd_distribution, reconstruct_density, require_overlaps, sigma_x, sigma_y, sigma_z, Basis64, DensityOperator64,
    HermitianOperator64, KdDistribution64, KdError, StateVector64,
};
use serde_json::{json, Map, Value};

const IDENTITY_TOL: f64 = 1e-10;
const CONVOLUTION_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "kdq", version, about = "Kirkwood-Dirac quasiprobability toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output file (stdout when omitted; a directory for `fig1 --split`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for `random:` builtins that omit one and for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the pass/fail tolerance of the command's check.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    /// Half-width of the output grid.
    #[arg(long, global = true)]
    grid_span: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Inputs accept either a JSON file path or a builtin spec.
///
/// Bases: `Z:d`, `F:d`, `X`, `Y`, `random:d[:seed]`.
/// States: `ket:d:k`, `mixed:d`, `phase:d`, `random:d[:seed]`.
/// Hamiltonians: `sx`, `sy`, `sz`, `random:d[:seed]`.
#[derive(Subcommand)]
enum Command {
    /// KD distribution of a state over two bases, with marginals.
    Kd {
        #[arg(long)]
        state: String,
        #[arg(long)]
        basis_a: String,
        #[arg(long)]
        basis_b: String,
    },
    /// Density operator recovered from a KD JSON file.
    Reconstruct {
        #[arg(long)]
        kd: PathBuf,
    },
    /// Replace one basis of a KD JSON file by `basis_c`.
    Transform {
        #[arg(long)]
        kd: PathBuf,
        #[arg(long)]
        basis_c: String,
        #[arg(long, value_enum, default_value_t = Slot::First)]
        slot: Slot,
        /// Write the conditional kernel instead of the transformed table.
        #[arg(long)]
        kernel: bool,
    },
    /// Forward-then-back kernel composition must give the identity.
    Determinism {
        #[arg(long)]
        basis_a: String,
        #[arg(long)]
        basis_b: String,
        #[arg(long)]
        basis_c: String,
    },
    /// Coarse-grained Gaussian conditionals next to the classical curve.
    Fig1 {
        #[arg(long, default_value_t = 1.0)]
        vq: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0, 2.0])]
        sigmas: Vec<f64>,
        /// One file per sigma inside the `--out` directory.
        #[arg(long)]
        split: bool,
    },
    #[command(subcommand)]
    Climit(Climit),
    /// Two-time KD distribution over `A@t1` and `A@t2`.
    Dynamics {
        #[arg(long)]
        state: String,
        #[arg(long)]
        basis: String,
        #[arg(long)]
        hamiltonian: String,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
    },
    /// Chained path kernel checked against the direct kernel.
    Path {
        #[arg(long)]
        basis: String,
        #[arg(long)]
        hamiltonian: String,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Probability rates from the KD imaginary energy vs the commutator.
    Ratelaw {
        #[arg(long)]
        state: String,
        #[arg(long)]
        basis: String,
        #[arg(long)]
        hamiltonian: String,
    },
    /// Seeded weak-measurement estimate of the KD table, one report per coupling.
    Weaksim {
        #[arg(long)]
        state: String,
        #[arg(long)]
        basis_a: String,
        #[arg(long)]
        basis_b: String,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1])]
        coupling: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Slot {
    First,
    Second,
}

#[derive(Subcommand)]
enum Climit {
    /// Analytic vs numerically convolved coarse-grained conditional.
    Curve {
        #[arg(long, default_value_t = 1.0)]
        vq: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// Sum of squared overlaps, which equals the dimension.
    Count {
        #[arg(long)]
        basis_a: String,
        #[arg(long)]
        basis_b: String,
    },
    /// Im-part residual of the phase-space test state on Z and F bases.
    Imlaw {
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String, String),
    Check(String),
}

impl From<KdError> for Failure {
    fn from(e: KdError) -> Self {
        Failure::Input(e.code().into(), e.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.code().into(), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Input("USAGE".into(), msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input("IO".into(), format!("{}: {e}", path.display())))
}

/// Splits `name:n[:m]` into its numeric fields.
fn spec_fields(spec: &str) -> Option<(&str, Vec<u64>)> {
    let mut parts = spec.split(':');
    let head = parts.next()?;
    let nums = parts.map(|p| p.parse().ok()).collect::<Option<Vec<u64>>>()?;
    Some((head, nums))
}

fn builtin_seed(nums: &[u64], fallback: u64) -> u64 {
    nums.get(1).copied().unwrap_or(fallback)
}

fn load_basis(spec: &str, seed: u64) -> Result<Basis64, Failure> {
    if let Some((head, nums)) = spec_fields(spec) {
        let d = nums.first().map(|&d| d as usize);
        match (head, d) {
            ("Z", Some(d)) => return Ok(Basis64::computational(d)?),
            ("F", Some(d)) => return Ok(Basis64::fourier(d)?),
            ("X", None) => return Ok(Basis64::pauli_x()),
            ("Y", None) => return Ok(Basis64::pauli_y()),
            ("random", Some(d)) if d >= 2 => {
                let s = builtin_seed(&nums, seed);
                return Ok(random_basis(format!("R{s}"), d, &mut seeded_rng(s)));
            }
            _ => {}
        }
    }
    Ok(parse_basis(&read(Path::new(spec))?)?)
}

fn load_state(spec: &str, seed: u64) -> Result<DensityOperator64, Failure> {
    if let Some((head, nums)) = spec_fields(spec) {
        let d = nums.first().map(|&d| d as usize);
        match (head, d) {
            ("ket", Some(d)) => {
                let k = *nums.get(1).ok_or_else(|| usage("ket:<d>:<k> needs an index"))? as usize;
                if k >= d {
                    return Err(usage(format!("ket index {k} out of range for d = {d}")));
                }
                return Ok(DensityOperator64::from_pure(&StateVector64::basis_state(d, k)?));
            }
            ("mixed", Some(d)) if d >= 2 => return Ok(DensityOperator64::maximally_mixed(d)),
            ("phase", Some(d)) => return Ok(phase_space_test_state(d)?),
            ("random", Some(d)) if d >= 2 => return Ok(random_density(d, &mut seeded_rng(builtin_seed(&nums, seed)))),
            _ => {}
        }
    }
    Ok(parse_state(&read(Path::new(spec))?)?)
}

fn load_hamiltonian(spec: &str, seed: u64) -> Result<HermitianOperator64, Failure> {
    match spec {
        "sx" => return Ok(sigma_x()),
        "sy" => return Ok(sigma_y()),
        "sz" => return Ok(sigma_z()),
        _ => {}
    }
    if let Some(("random", nums)) = spec_fields(spec) {
        if let Some(&d) = nums.first().filter(|&&d| d >= 2) {
            return Ok(random_hermitian(d as usize, &mut seeded_rng(builtin_seed(&nums, seed))));
        }
    }
    Ok(parse_hermitian(&read(Path::new(spec))?)?)
}

struct Ctx {
    g: Global,
}

impl Ctx {
    fn tol(&self, default: f64) -> Result<f64, Failure> {
        match self.g.tolerance {
            Some(t) if !(t.is_finite() && t > 0.0) => Err(usage(format!("tolerance must be positive, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    fn emit(&self, text: &str) -> Outcome {
        match &self.g.out {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::Input("IO".into(), format!("{}: {e}", path.display()))),
            None => match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input("IO".into(), e.to_string())),
                _ => Ok(()),
            },
        }
    }

    /// Flat key/value report: one JSON object or a two-line CSV.
    fn emit_report(&self, report: &Map<String, Value>) -> Outcome {
        let text = match self.g.format {
            Format::Json => serde_json::to_string_pretty(report).expect("plain data") + "\n",
            Format::Csv => {
                let cell = |v: &Value| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let keys: Vec<&str> = report.keys().map(String::as_str).collect();
                let vals: Vec<String> = report.values().map(cell).collect();
                format!("{}\n{}\n", keys.join(","), vals.join(","))
            }
        };
        self.emit(&text)
    }

    fn emit_kd(&self, kd: &KdDistribution64, meta: Vec<(&str, Value)>) -> Outcome {
        let text = match self.g.format {
            Format::Json => kd_to_json(kd, Some(Value::Object(meta.into_iter().map(|(k, v)| (k.into(), v)).collect()))) + "\n",
            Format::Csv => {
                let meta: Vec<(&str, String)> = meta.into_iter().map(|(k, v)| (k, v.to_string())).collect();
                kd_to_csv(kd, &meta)
            }
        };
        self.emit(&text)
    }
}

fn pairs(v: &[kdq::C64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn check(value: f64, tol: f64, what: &str) -> Outcome {
    if value <= tol {
        Ok(())
    } else {
        Err(Failure::Check(format!("{what} {value:e} exceeds tolerance {tol:e}")))
    }
}

fn kd_meta(kd: &KdDistribution64) -> Result<Vec<(&'static str, Value)>, Failure> {
    let total = kd.total();
    Ok(vec![
        ("total", json!([total.re, total.im])),
        ("row_marginals", pairs(&kd.row_marginals())),
        ("column_marginals", pairs(&kd.column_marginals())),
        ("marginal_deviation", json!(kd.marginal_deviation()?)),
    ])
}

fn run(ctx: &Ctx, cmd: Command) -> Outcome {
    let seed = ctx.g.seed;
    match cmd {
        Command::Kd { state, basis_a, basis_b } => {
            let rho = load_state(&state, seed)?;
            let a = load_basis(&basis_a, seed)?;
            let b = load_basis(&basis_b, seed)?;
            let tol = ctx.tol(IDENTITY_TOL)?;
            require_overlaps(&a, &b)?;
            let kd = kd_distribution(&rho, &a, &b)?;
            let dev = kd.marginal_deviation()?;
            log::info!("KD over ({}, {}), marginal deviation {dev:e}", a.label(), b.label());
            ctx.emit_kd(&kd, kd_meta(&kd)?)?;
            check(dev, tol, "marginal deviation")
        }
        Command::Reconstruct { kd } => {
            let kd: KdDistribution64 = parse_kd(&read(&kd)?)?;
            let rho = reconstruct_density(&kd)?;
            let text = match ctx.g.format {
                Format::Json => operator_to_json(rho.as_operator()) + "\n",
                Format::Csv => {
                    let d = rho.dim();
                    let mut s = String::from("i,j,re,im\n");
                    for (k, z) in rho.as_operator().row_major().iter().enumerate() {
                        s += &format!("{},{},{},{}\n", k / d, k % d, z.re, z.im);
                    }
                    s
                }
            };
            ctx.emit(&text)
        }
        Command::Transform { kd, basis_c, slot, kernel } => {
            let kd: KdDistribution64 = parse_kd(&read(&kd)?)?;
            let c = load_basis(&basis_c, seed)?;
            let (a, b) = (kd.basis_a(), kd.basis_b());
            // both slots use p(c|a,b); they differ only in which index is summed
            let k = conditional_kernel(&c, a, b)?;
            if kernel {
                let text = match ctx.g.format {
                    Format::Json => {
                        serde_json::to_string_pretty(&KernelJson::from_kernel(&k, None)).expect("plain data") + "\n"
                    }
                    Format::Csv => kernel_values_to_csv(k.dim(), k.values(), &[]),
                };
                return ctx.emit(&text);
            }
            let out = match slot {
                Slot::First => transform_kd(&kd, &k)?,
                Slot::Second => transform_kd_second(&kd, &k)?,
            };
            ctx.emit_kd(&out, kd_meta(&out)?)
        }
        Command::Determinism { basis_a, basis_b, basis_c } => {
            let a = load_basis(&basis_a, seed)?;
            let b = load_basis(&basis_b, seed)?;
            let c = load_basis(&basis_c, seed)?;
            let tol = ctx.tol(IDENTITY_TOL)?;
            let dev = verify_determinism(&a, &b, &c)?;
            let mut r = Map::new();
            r.insert("dim".into(), json!(a.dim()));
            r.insert("deviation".into(), json!(dev));
            r.insert("tolerance".into(), json!(tol));
            r.insert("pass".into(), json!(dev <= tol));
            ctx.emit_report(&r)?;
            check(dev, tol, "determinism deviation")
        }
        Command::Fig1 { vq, sigmas, split } => {
            if sigmas.is_empty() {
                return Err(usage("at least one sigma is required"));
            }
            let opts = GridOptions {
                step: ctx.g.grid_step,
                half_span: ctx.g.grid_span,
            };
            let panels = figure1_data(vq, &sigmas, opts)?;
            if split {
                let dir = ctx.g.out.as_ref().ok_or_else(|| usage("--split needs --out <directory>"))?;
                fs::create_dir_all(dir).map_err(|e| Failure::Input("IO".into(), e.to_string()))?;
                for p in &panels {
                    let (name, text) = match ctx.g.format {
                        Format::Csv => (format!("sigma_{}.csv", p.sigma), figure1_to_csv(std::slice::from_ref(p))),
                        Format::Json => (format!("sigma_{}.json", p.sigma), fig1_json(std::slice::from_ref(p))),
                    };
                    let path = dir.join(name);
                    fs::write(&path, text).map_err(|e| Failure::Input("IO".into(), format!("{}: {e}", path.display())))?;
                }
                Ok(())
            } else {
                ctx.emit(&match ctx.g.format {
                    Format::Csv => figure1_to_csv(&panels),
                    Format::Json => fig1_json(&panels),
                })
            }
        }
        Command::Climit(c) => run_climit(ctx, c),
        Command::Dynamics { state, basis, hamiltonian, t1, t2 } => {
            let rho = load_state(&state, seed)?;
            let base = load_basis(&basis, seed)?;
            let h = load_hamiltonian(&hamiltonian, seed)?;
            let kd = two_time_kd(&rho, &base, &h, t1, t2)?;
            let mut meta = vec![("times", json!([t1, t2]))];
            meta.extend(kd_meta(&kd)?);
            ctx.emit_kd(&kd, meta)
        }
        Command::Path { basis, hamiltonian, times } => {
            let base = load_basis(&basis, seed)?;
            let h = load_hamiltonian(&hamiltonian, seed)?;
            let tol = ctx.tol(IDENTITY_TOL)?;
            let chained = path_kernel(&base, &h, &times)?;
            let direct = direct_path_kernel(&base, &h, times[0], times[1], times[times.len() - 1])?;
            let diff = chained.max_abs_diff(&direct)?;
            let norm = chained.normalization_deviation();
            log::info!("path over {} times: diff {diff:e}, normalization {norm:e}", times.len());
            let meta = [
                ("times", json!(times)),
                ("max_diff_direct", json!(diff)),
                ("normalization_deviation", json!(norm)),
            ];
            let text = match ctx.g.format {
                Format::Json => {
                    let at = |t: f64| kdq::dynamics::timed_basis(&base, &h, t).map(|b| b.into_basis());
                    let j = KernelJson::from_parts(
                        &at(times[times.len() - 1])?,
                        &at(times[0])?,
                        &at(times[1])?,
                        &chained.values,
                        Some(Value::Object(meta.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())),
                    );
                    serde_json::to_string_pretty(&j).expect("plain data") + "\n"
                }
                Format::Csv => {
                    let meta: Vec<(&str, String)> = meta.iter().map(|(k, v)| (*k, v.to_string())).collect();
                    kernel_values_to_csv(chained.dim(), &chained.values, &meta)
                }
            };
            ctx.emit(&text)?;
            check(diff.max(norm), tol, "path kernel deviation")
        }
        Command::Ratelaw { state, basis, hamiltonian } => {
            let rho = load_state(&state, seed)?;
            let base = load_basis(&basis, seed)?;
            let h = load_hamiltonian(&hamiltonian, seed)?;
            let tol = ctx.tol(IDENTITY_TOL)?;
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for a in 0..base.dim() {
                let kd_rate = rate_via_imaginary_energy(&rho, &base, &h, a)?;
                let comm = commutator_rate(&rho, &base, &h, a)?;
                worst = worst.max((kd_rate - comm).abs());
                rows.push((a, kd_rate, comm));
            }
            let text = match ctx.g.format {
                Format::Csv => {
                    let mut s = format!("# max_diff={worst}\na,rate_kd,rate_commutator\n");
                    for (a, k, c) in &rows {
                        s += &format!("{a},{k},{c}\n");
                    }
                    s
                }
                Format::Json => {
                    let rows: Vec<Value> =
                        rows.iter().map(|(a, k, c)| json!({"a": a, "rate_kd": k, "rate_commutator": c})).collect();
                    serde_json::to_string_pretty(&json!({"rates": rows, "max_diff": worst})).expect("plain data") + "\n"
                }
            };
            ctx.emit(&text)?;
            check(worst, tol, "rate law mismatch")
        }
        Command::Weaksim { state, basis_a, basis_b, coupling, samples, width } => {
            let rho = load_state(&state, seed)?;
            let a = load_basis(&basis_a, seed)?;
            let b = load_basis(&basis_b, seed)?;
            let exact = kd_distribution(&rho, &a, &b)?;
            let mut reports = Vec::new();
            for &g in &coupling {
                let spec = PointerSpec::standard(width, g)?;
                let bias = weak_estimate_kd(&rho, &a, &b, &spec)?.max_abs_error(&exact)?;
                let sampled = sample_weak_records(&rho, &a, &b, &spec, samples, seed)?;
                let sampled_err = sampled.estimate.max_abs_error(&exact)?;
                log::info!("g = {g}: expected-estimate error {bias:e}, sampled error {sampled_err:e}");
                let meta = json!({"width": width, "max_error_expected": bias, "max_error_sampled": sampled_err});
                reports.push(WeakReportJson::from_sampled(&sampled, Some(meta)));
            }
            let text = match ctx.g.format {
                Format::Json => serde_json::to_string_pretty(&reports).expect("plain data") + "\n",
                Format::Csv => {
                    let mut s = String::from("g,a,b,re,im,stderr_re,stderr_im,n,seed,max_error_expected\n");
                    for r in &reports {
                        let bias = &r.metadata.as_ref().expect("set above")["max_error_expected"];
                        for e in &r.entries {
                            s += &format!(
                                "{},{},{},{},{},{},{},{},{},{}\n",
                                e.g, e.a, e.b, e.estimate.0, e.estimate.1, e.stderr.0, e.stderr.1, e.n, e.seed, bias
                            );
                        }
                    }
                    s
                }
            };
            ctx.emit(&text)
        }
    }
}

fn fig1_json(panels: &[Figure1Panel<f64>]) -> String {
    let v: Vec<Value> = panels
        .iter()
        .map(|p| {
            json!({
                "sigma": p.sigma,
                "epsilon": p.epsilon,
                "c": p.rows.iter().map(|r| r.c).collect::<Vec<_>>(),
                "re_q": p.rows.iter().map(|r| r.re_q).collect::<Vec<_>>(),
                "im_q": p.rows.iter().map(|r| r.im_q).collect::<Vec<_>>(),
                "classical": p.rows.iter().map(|r| r.classical).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&v).expect("plain data") + "\n"
}

fn run_climit(ctx: &Ctx, cmd: Climit) -> Outcome {
    let seed = ctx.g.seed;
    match cmd {
        Climit::Curve { vq, sigma } => {
            let model = GaussianModel::centered(vq, 0.0)?;
            let default = CoarseGrainSpec::default_for(&model, sigma)?;
            let grid = UniformGrid::centered(
                0.0,
                ctx.g.grid_span.unwrap_or(default.grid.half_span()),
                ctx.g.grid_step.unwrap_or(default.grid.step()),
            )?;
            let spec = CoarseGrainSpec::new(&model, sigma, grid)?;
            let tol = ctx.tol(CONVOLUTION_TOL)?;
            let numeric = coarse_grain_numeric(&gaussian_conditional(&model, &spec.input_grid())?, sigma)?;
            let analytic = coarse_grain_analytic(&model, sigma, &numeric.grid)?;
            let diff = numeric.max_abs_diff(&analytic)?;
            let eps = epsilon(vq, sigma);
            let text = match ctx.g.format {
                Format::Csv => {
                    let mut s = format!(
                        "# epsilon={eps}\n# max_diff={diff}\nc,re_analytic,im_analytic,re_numeric,im_numeric\n"
                    );
                    for (i, (p, q)) in analytic.samples.iter().zip(&numeric.samples).enumerate() {
                        s += &format!("{},{},{},{},{}\n", numeric.grid.point(i), p.re, p.im, q.re, q.im);
                    }
                    s
                }
                Format::Json => {
                    let v = json!({
                        "vq": vq, "sigma": sigma, "epsilon": eps, "max_diff": diff,
                        "c": numeric.grid.points().collect::<Vec<_>>(),
                        "analytic": pairs(&analytic.samples),
                        "numeric": pairs(&numeric.samples),
                    });
                    serde_json::to_string_pretty(&v).expect("plain data") + "\n"
                }
            };
            ctx.emit(&text)?;
            check(diff, tol, "analytic vs numeric coarse graining")
        }
        Climit::Count { basis_a, basis_b } => {
            let a = load_basis(&basis_a, seed)?;
            let b = load_basis(&basis_b, seed)?;
            let tol = ctx.tol(IDENTITY_TOL)?;
            let sum = state_count_check(&a, &b)?;
            let dev = (sum - a.dim() as f64).abs();
            let mut r = Map::new();
            r.insert("dim".into(), json!(a.dim()));
            r.insert("sum".into(), json!(sum));
            r.insert("deviation".into(), json!(dev));
            ctx.emit_report(&r)?;
            check(dev, tol, "state count deviation")
        }
        Climit::Imlaw { dim } => {
            let rho = phase_space_test_state(dim)?;
            let kd = kd_distribution(&rho, &Basis64::computational(dim)?, &Basis64::fourier(dim)?)?;
            let residual = discrete_im_law_residual(&kd)?;
            let mut r = Map::new();
            r.insert("dim".into(), json!(dim));
            r.insert("residual".into(), json!(residual));
            ctx.emit_report(&r)
        }
    }
}

fn fail(code: &str, message: &str, status: u8) -> ExitCode {
    eprintln!("{}", json!({"code": code, "message": message}));
    ExitCode::from(status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("KDQ_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("USAGE", e.to_string().trim(), 2),
    };
    let ctx = Ctx { g: cli.global };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(code, msg)) => fail(&code, &msg, 2),
        Err(Failure::Check(msg)) => fail("CHECK_FAILED", &msg, 1),
    }
}
