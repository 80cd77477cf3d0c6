use kdq::climit::{figure1_data, GridOptions};
use kdq::determinism::conditional_kernel;
use kdq::io::{
    figure1_to_csv, kd_to_csv, kd_to_json, kernel_to_csv, kernel_to_json, operator_to_json, parse_basis, parse_hermitian,
    parse_kd, parse_operator, parse_state, BasisJson, KernelJson, WeakReportJson,
};
use kdq::random::{random_basis, random_density, seeded_rng};
use kdq::weaksim::{sample_weak_records, PointerSpec};
use kdq::{kd_distribution, sigma_y, Basis64, DensityOperator64, StateVector64};

#[test]
fn pure_and_mixed_states_parse_to_the_same_operator() {
    let pure: DensityOperator64 = parse_state("[[0.6, 0], [0, 0.8]]").unwrap();
    let mixed: DensityOperator64 = parse_state("[[[0.36, 0], [0, -0.48]], [[0, 0.48], [0.64, 0]]]").unwrap();
    assert!(pure.max_abs_diff(&mixed).unwrap() < 1e-15);
}

#[test]
fn invalid_inputs_carry_codes() {
    let code = |r: Result<DensityOperator64, kdq::io::IoError>| r.unwrap_err().code();
    assert_eq!(code(parse_state("[[1, 0], [0")), "PARSE");
    assert_eq!(code(parse_state("{\"x\": 1}")), "PARSE");
    assert_eq!(code(parse_state("[[1, 0], [1, 0]]")), "NOT_NORMALIZED");
    assert_eq!(code(parse_state("[[[1, 0], [0, 0]], [[0, 0]]]")), "PARSE");
    assert_eq!(
        parse_basis::<f64>(r#"{"label": "W", "states": [[[1,0],[0,0]], [[1,0],[0,0]]]}"#)
            .unwrap_err()
            .code(),
        "NOT_ORTHONORMAL"
    );
    assert_eq!(parse_hermitian::<f64>("[[[0,0],[1,0]],[[0,0],[0,0]]]").unwrap_err().code(), "NOT_HERMITIAN");
}

#[test]
fn bases_and_operators_round_trip() {
    let mut rng = seeded_rng(5);
    let b: Basis64 = random_basis("R", 5, &mut rng);
    let text = serde_json::to_string(&BasisJson::from_basis(&b)).unwrap();
    assert_eq!(parse_basis::<f64>(&text).unwrap(), b);
    let y = sigma_y::<f64>();
    assert_eq!(&parse_operator::<f64>(&operator_to_json(y.as_operator())).unwrap(), y.as_operator());
}

#[test]
fn kd_json_round_trip_is_exact() {
    let mut rng = seeded_rng(11);
    for d in [2, 3, 7] {
        let rho: DensityOperator64 = random_density(d, &mut rng);
        let a = random_basis("A", d, &mut rng);
        let b = random_basis("B", d, &mut rng);
        let kd = kd_distribution(&rho, &a, &b).unwrap();
        let text = kd_to_json(&kd, Some(serde_json::json!({"seed": 11})));
        let back = parse_kd::<f64>(&text).unwrap();
        assert_eq!(back, kd);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["values"][0][0].as_array().unwrap().len(), 2);
        assert_eq!(v["basisA"]["label"], "A");
    }
}

#[test]
fn kd_csv_layout() {
    let zero = DensityOperator64::from_pure(&StateVector64::basis_state(2, 0).unwrap());
    let kd = kd_distribution(&zero, &Basis64::computational(2).unwrap(), &Basis64::pauli_x()).unwrap();
    let text = kd_to_csv(&kd, &[("state", "zero".into())]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# state=zero");
    assert_eq!(lines[1], "a,b,re,im");
    assert_eq!(lines.len(), 6);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows: Vec<(usize, usize, f64, f64)> = reader.deserialize().map(|r| r.unwrap()).collect();
    for (a, b, re, im) in rows {
        let expect = if a == 0 { 0.5 } else { 0.0 };
        assert!((re - expect).abs() < 1e-15 && im.abs() < 1e-15, "({a},{b})");
    }
}

#[test]
fn kernel_outputs_share_index_order() {
    let mut rng = seeded_rng(3);
    let bases: Vec<Basis64> = ["C", "A", "B"].iter().map(|l| random_basis(*l, 3, &mut rng)).collect();
    let k = conditional_kernel(&bases[0], &bases[1], &bases[2]).unwrap();
    let json: KernelJson = serde_json::from_str(&kernel_to_json(&k, None)).unwrap();
    let csv_text = kernel_to_csv(&k);
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["c", "a", "b", "re", "im"]);
    let mut count = 0;
    for row in reader.deserialize::<(usize, usize, usize, f64, f64)>() {
        let (c, a, b, re, im) = row.unwrap();
        let z = k.value(c, a, b);
        assert_eq!((re, im), (z.re, z.im));
        let p = json.values[c][a][b];
        assert_eq!((p.0, p.1), (z.re, z.im));
        count += 1;
    }
    assert_eq!(count, 27);
}

#[test]
fn figure_csv_is_long_format() {
    let panels = figure1_data(1.0, &[0.5, 2.0], GridOptions::default()).unwrap();
    let text = figure1_to_csv(&panels);
    assert!(text.starts_with("sigma,c,re_q,im_q,classical\n"));
    let rows = text.lines().count() - 1;
    assert_eq!(rows, panels.iter().map(|p| p.rows.len()).sum::<usize>());
    assert_eq!(text, figure1_to_csv(&figure1_data(1.0, &[0.5, 2.0], GridOptions::default()).unwrap()));
}

#[test]
fn weak_report_has_one_entry_per_cell() {
    let rho = DensityOperator64::from_pure(&StateVector64::basis_state(2, 0).unwrap());
    let spec = PointerSpec::standard(1.0, 0.1).unwrap();
    let s = sample_weak_records(&rho, &Basis64::computational(2).unwrap(), &Basis64::pauli_x(), &spec, 2000, 9).unwrap();
    let report = WeakReportJson::from_sampled(&s, None);
    let v = serde_json::to_value(&report).unwrap();
    assert_eq!(report.entries.len(), 4);
    for e in v["entries"].as_array().unwrap() {
        for key in ["estimate", "stderr", "g", "n", "seed"] {
            assert!(e.get(key).is_some(), "missing {key}");
        }
        assert_eq!(e["seed"], 9);
        assert_eq!(e["n"], 2000);
    }
}
