//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use kdq::climit::{
    coarse_grain_analytic, coarse_grain_numeric, discrete_im_law_residual, epsilon, figure1_data,
    gaussian_conditional, imaginary_variance, phase_space_test_state, CoarseGrainSpec, GaussianModel, GridOptions,
};
use kdq::determinism::{conditional_kernel, transform_kd, verify_determinism};
use kdq::dynamics::{path_kernel, rate_via_imaginary_energy, schrodinger_conditional_check, two_time_kd};
use kdq::random::{random_basis, random_density, random_hermitian, seeded_rng};
use kdq::weaksim::{sample_weak_records, weak_estimate_kd, PointerSpec};
use kdq::{
    expectation, kd_distribution, lambda_operator, reconstruct_density, sigma_x, sigma_z, weak_value, Basis64,
    DensityOperator64, KdError, C64,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const TOL: f64 = 1e-10;

struct Case {
    rho: DensityOperator64,
    a: Basis64,
    b: Basis64,
}

/// 100 seeded `(ρ, A, B)` with d cycling through {2, 3, 4, 8} and every
/// overlap modulus at least 0.05.
fn roundtrip_corpus() -> Vec<Case> {
    let mut rng = seeded_rng(0x5eed_0001);
    (0..100)
        .map(|i| {
            let d = [2, 3, 4, 8][i % 4];
            let rho = random_density(d, &mut rng);
            let (a, b) = basis_pair(d, 0.05, &mut rng);
            Case { rho, a, b }
        })
        .collect()
}

fn reconstruction_round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in roundtrip_corpus() {
        let kd = kd_distribution(&case.rho, &case.a, &case.b).unwrap();
        let back = reconstruct_density(&kd).unwrap();
        worst = worst.max(max_diff(&to_mat(back.as_operator()), &to_mat(case.rho.as_operator())));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < TOL && secs < 5.0,
        format!("max |rho_rec - rho| = {worst:.2e} over 100 cases in {secs:.2} s"),
    )
}

fn marginals_and_normalization() -> Outcome {
    let (mut norm_err, mut marg_err): (f64, f64) = (0.0, 0.0);
    for case in roundtrip_corpus() {
        let kd = kd_distribution(&case.rho, &case.a, &case.b).unwrap();
        norm_err = norm_err.max((kd.total() - C64::new(1.0, 0.0)).norm());
        let r = to_mat(case.rho.as_operator());
        for (i, m) in kd.row_marginals().iter().enumerate() {
            let s = case.a.state(i).amplitudes();
            marg_err = marg_err.max((m - sandwich(s, &r, s)).norm());
        }
        for (j, m) in kd.column_marginals().iter().enumerate() {
            let s = case.b.state(j).amplitudes();
            marg_err = marg_err.max((m - sandwich(s, &r, s)).norm());
        }
    }
    outcome(
        norm_err < TOL && marg_err < TOL,
        format!("|sum - 1| = {norm_err:.2e}, max |marginal - Born| = {marg_err:.2e}"),
    )
}

fn determinism_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(0x5eed_0003);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = [2, 3, 4, 8, 16][i % 5];
        let a = random_basis("A", d, &mut rng);
        let b = random_basis("B", d, &mut rng);
        let c = random_basis("C", d, &mut rng);
        worst = worst.max(verify_determinism(&a, &b, &c).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < TOL && secs < 10.0,
        format!("max deviation = {worst:.2e} over 50 triples (d <= 16) in {secs:.2} s"),
    )
}

fn transform_consistency() -> Outcome {
    let mut rng = seeded_rng(0x5eed_0004);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = [2, 3, 4, 8][i % 4];
        let rho = random_density(d, &mut rng);
        let (a, b) = basis_pair(d, 0.05, &mut rng);
        let c = random_basis("C", d, &mut rng);
        let kd = kd_distribution(&rho, &a, &b).unwrap();
        let out = transform_kd(&kd, &conditional_kernel(&c, &a, &b).unwrap()).unwrap();
        let direct = kd_oracle(&rho, &states_of(&c), &states_of(&b));
        worst = worst.max(max_vec_diff(out.values(), &direct));
    }
    outcome(worst < TOL, format!("max |transformed - direct| = {worst:.2e} over 50 cases"))
}

fn expectation_equivalence() -> Outcome {
    let mut rng = seeded_rng(0x5eed_0005);
    let (mut re_err, mut im_err): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let d = [2, 3, 4, 8][i % 4];
        let rho = random_density(d, &mut rng);
        let (a, b) = basis_pair(d, 0.05, &mut rng);
        let m = random_hermitian(d, &mut rng);
        let kd = kd_distribution(&rho, &a, &b).unwrap();
        let e = expectation(&kd, m.as_operator()).unwrap();
        let oracle = trace(&matmul(&to_mat(rho.as_operator()), &to_mat(m.as_operator())));
        re_err = re_err.max((e - oracle).norm());
        im_err = im_err.max(e.im.abs());
    }
    outcome(
        re_err < TOL && im_err < TOL,
        format!("max |<M>_KD - Tr(rho M)| = {re_err:.2e}, max |Im| = {im_err:.2e} over 100 cases"),
    )
}

fn figure_one() -> Outcome {
    let start = Instant::now();
    let model = GaussianModel::centered(1.0, 0.0).unwrap();
    let sigmas = [0.25, 0.5, 1.0, 2.0];
    let mut conv: f64 = 0.0;
    for &s in &sigmas {
        let spec = CoarseGrainSpec::default_for(&model, s).unwrap();
        let raw = gaussian_conditional(&model, &spec.input_grid()).unwrap();
        let num = coarse_grain_numeric(&raw, s).unwrap();
        let ana = coarse_grain_analytic(&model, s, &num.grid).unwrap();
        conv = conv.max(num.max_abs_diff(&ana).unwrap());
    }
    let eps: Vec<f64> = sigmas.iter().map(|&s| epsilon(1.0, s)).collect();
    let eps_ok = eps == [16.0, 4.0, 1.0, 0.25];
    let panels = figure1_data(1.0, &sigmas, GridOptions::default()).unwrap();
    let dev = panels[3].relative_re_deviation();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        conv < 1e-6 && eps_ok && dev < 0.05 && secs < 5.0,
        format!(
            "max |numeric - analytic| = {conv:.2e}, eps = {eps:?}, sigma=2 Re deviation = {:.2}% of peak, {secs:.2} s",
            100.0 * dev
        ),
    )
}

fn mub_imaginary_variance() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut unbiased = true;
    for d in [2usize, 4, 8] {
        let z = Basis64::computational(d).unwrap();
        let f = Basis64::fourier(d).unwrap();
        let (a, b, c) = (z.state(0), f.state(0), chirp_state(d));
        for (u, v) in [(a, b), (b, &c), (&c, a)] {
            let p = braket(u.amplitudes(), v.amplitudes()).norm_sqr();
            unbiased &= (p - 1.0 / d as f64).abs() < 1e-14;
        }
        let vq = imaginary_variance(a, b, &c).unwrap();
        worst = worst.max((vq - d as f64 / (2.0 * PI)).abs());
    }
    outcome(
        worst < 1e-12 && unbiased,
        format!("max |V_q - d/(2 pi)| = {worst:.2e} for d in {{2, 4, 8}}"),
    )
}

fn path_telescoping() -> Outcome {
    let mut rng = seeded_rng(0x5eed_0008);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in [2usize, 3, 4, 8] {
        for n in 3..=8 {
            let a = random_basis("A", d, &mut rng);
            let h = random_hermitian(d, &mut rng);
            let times: Vec<f64> = (0..n).map(|k| 0.31 * k as f64 + 0.05 * (k * k) as f64).collect();
            let chained = path_kernel(&a, &h, &times).unwrap();
            let direct = kernel_oracle(
                &timed_states(&a, &h, times[n - 1]),
                &timed_states(&a, &h, times[0]),
                &timed_states(&a, &h, times[1]),
            );
            worst = worst.max(max_vec_diff(&chained.values, &direct));
            cases += 1;
        }
    }
    outcome(
        worst < TOL,
        format!("max |chained - direct| = {worst:.2e} over {cases} chains (n <= 8, d <= 8)"),
    )
}

fn rate_law() -> Outcome {
    let mut rng = seeded_rng(0x5eed_0009);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = [2, 3, 4, 8][i % 4];
        let rho = random_density(d, &mut rng);
        let h = random_hermitian(d, &mut rng);
        let a = random_basis("A", d, &mut rng);
        let k = i % d;
        let rate = rate_via_imaginary_energy(&rho, &a, &h, k).unwrap();
        let r = to_mat(rho.as_operator());
        let hm = to_mat(h.as_operator());
        let s = a.state(k).amplitudes();
        let oracle = (C64::new(0.0, -1.0) * (sandwich(s, &matmul(&hm, &r), s) - sandwich(s, &matmul(&r, &hm), s))).re;
        worst = worst.max((rate - oracle).abs());
    }
    let plus = DensityOperator64::from_pure(Basis64::pauli_x().state(0));
    let worked = rate_via_imaginary_energy(&plus, &Basis64::pauli_y(), &sigma_z(), 0).unwrap();
    outcome(
        worst < TOL && (worked - 1.0).abs() < 1e-12,
        format!("max |rate - commutator| = {worst:.2e} over 100 cases, worked example = {worked}"),
    )
}

fn schrodinger_scaling() -> Outcome {
    let mut rng = seeded_rng(0x5eed_0010);
    let mut ratios = Vec::new();
    for case in 0..5 {
        let a = random_basis("A", 4, &mut rng);
        let h = random_hermitian(4, &mut rng);
        let (n, k, t) = (case % 4, (case + 1) % 4, 0.2 + 0.3 * case as f64);
        let coarse = schrodinger_conditional_check(&a, &h, n, k, t, 1e-3).unwrap();
        let fine = schrodinger_conditional_check(&a, &h, n, k, t, 1e-4).unwrap();
        ratios.push(coarse / fine);
    }
    let ok = ratios.iter().all(|r| (60.0..=140.0).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.1}")).collect();
    outcome(ok, format!("residual(1e-3)/residual(1e-4) = [{}] on 5 seeded d=4 cases", shown.join(", ")))
}

fn discrete_im_law() -> Outcome {
    let residual = |d: usize| {
        let rho = phase_space_test_state(d).unwrap();
        let kd = kd_distribution(&rho, &Basis64::computational(d).unwrap(), &Basis64::fourier(d).unwrap()).unwrap();
        discrete_im_law_residual(&kd).unwrap()
    };
    let (r16, r64) = (residual(16), residual(64));
    outcome(r64 < r16, format!("relative residual d=16: {r16:.3e}, d=64: {r64:.3e}"))
}

fn weak_measurement() -> Outcome {
    let start = Instant::now();
    let z = Basis64::computational(2).unwrap();
    let x = Basis64::pauli_x();
    let rho = DensityOperator64::from_pure(Basis64::pauli_y().state(0));
    let kd = kd_distribution(&rho, &z, &x).unwrap();
    let gs = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = gs
        .iter()
        .map(|&g| {
            let spec = PointerSpec::standard(1.0, g).unwrap();
            weak_estimate_kd(&rho, &z, &x, &spec).unwrap().max_abs_error(&kd).unwrap()
        })
        .collect();
    // C fitted at the largest coupling; every g must satisfy err <= C g, and
    // no implied constant may exceed C by more than a factor 2.
    let c_fit = errs[0] / gs[0];
    let implied: Vec<f64> = errs.iter().zip(&gs).map(|(e, g)| e / g).collect();
    let bounded = errs.iter().zip(&gs).all(|(e, g)| *e <= c_fit * g * (1.0 + 1e-12));
    let stable = implied.iter().all(|k| *k <= 2.0 * c_fit);
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);

    let spec = PointerSpec::standard(1.0, 0.1).unwrap();
    let exact = weak_estimate_kd(&rho, &z, &x, &spec).unwrap();
    let sampled = sample_weak_records(&rho, &z, &x, &spec, 1_000_000, 20_240_601).unwrap();
    let mut within = 0;
    let mut total = 0;
    for ((s, e), err) in sampled.estimate.values.iter().zip(&exact.values).zip(&sampled.stderr) {
        for (ds, se) in [((s.re - e.re).abs(), err.re), ((s.im - e.im).abs(), err.im)] {
            total += 1;
            if ds < 4.0 * se {
                within += 1;
            }
        }
    }
    let frac = within as f64 / total as f64;
    let secs = start.elapsed().as_secs_f64();
    let fmt = |v: &[f64]| v.iter().map(|k| format!("{k:.2e}")).collect::<Vec<_>>().join(", ");
    outcome(
        bounded && stable && monotone && frac >= 0.95 && secs < 60.0,
        format!(
            "err(g) = [{}], err/g = [{}] (max/min {:.1}), C = {c_fit:.2e}; sampled within 4 stderr: {within}/{total}; {secs:.1} s",
            fmt(&errs),
            fmt(&implied),
            implied[0] / implied[2]
        ),
    )
}

fn degenerate_inputs() -> Outcome {
    let z = Basis64::computational(2).unwrap();
    let x = Basis64::pauli_x();
    let rho = DensityOperator64::maximally_mixed(2);
    let near = |r: Result<(), KdError>| matches!(r, Err(KdError::NearOrthogonalOverlap { .. }));
    let mut checks = Vec::new();

    let same = kd_distribution(&rho, &z, &z).unwrap();
    checks.push(("same-basis KD values finite", same.values().iter().all(|v| v.re.is_finite() && v.im.is_finite())));
    checks.push(("same-basis reconstruction", near(reconstruct_density(&same).map(|_| ()))));
    checks.push(("same-basis lambda", near(lambda_operator(0, 1, &z, &z).map(|_| ()))));
    checks.push(("same-basis weak value", near(weak_value(sigma_x().as_operator(), 0, 1, &z, &z).map(|_| ()))));
    checks.push(("same-basis kernel", near(conditional_kernel(&x, &z, &z).map(|_| ()))));
    checks.push(("same-basis weak simulation", {
        let spec = PointerSpec::standard(1.0, 0.1).unwrap();
        near(weak_estimate_kd(&rho, &z, &z, &spec).map(|_| ()))
    }));
    checks.push(("t1 = t2 dynamics", near(two_time_kd(&rho, &z, &sigma_x(), 0.7, 0.7).map(|_| ()))));
    let plus = DensityOperator64::from_pure(x.state(0));
    let spec = PointerSpec::standard(1.0, 0.1).unwrap();
    checks.push((
        "zero-probability post-selection (exact)",
        matches!(weak_estimate_kd(&plus, &z, &x, &spec), Err(KdError::PostSelectionImpossible { .. })),
    ));
    checks.push((
        "zero-probability post-selection (sampled)",
        matches!(
            sample_weak_records(&plus, &z, &x, &spec, 10_000, 1),
            Err(KdError::PostSelectionImpossible { .. })
        ),
    ));
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} degenerate inputs rejected with their specified errors", checks.len())
        } else {
            format!("unexpected behaviour: {}", failed.join("; "))
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("reconstruction round trip", reconstruction_round_trip),
        ("marginals and normalization", marginals_and_normalization),
        ("determinism identity", determinism_identity),
        ("transform consistency", transform_consistency),
        ("expectation equivalence", expectation_equivalence),
        ("coarse-grained Gaussian figure", figure_one),
        ("unbiased imaginary variance", mub_imaginary_variance),
        ("path kernel telescoping", path_telescoping),
        ("imaginary-energy rate law", rate_law),
        ("conditional Schroedinger check", schrodinger_scaling),
        ("discrete imaginary-part law", discrete_im_law),
        ("weak-measurement verification", weak_measurement),
        ("degenerate-input contract", degenerate_inputs),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
