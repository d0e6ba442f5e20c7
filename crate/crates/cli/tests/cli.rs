use std::process::{Command, Output};

fn etpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etpa")).args(args).output().expect("run etpa")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<csv::StringRecord> {
    let text = stdout(o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(Result::unwrap).collect()
}

fn column(o: &Output, name: &str) -> Vec<String> {
    let text = stdout(o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column");
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a / b - 1.0).abs() <= tol
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(etpa(&["--help"]).status.code(), Some(0));
    assert_eq!(etpa(&["--version"]).status.code(), Some(0));
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(etpa(&["bogus"]).status.code(), Some(1));
    assert_eq!(etpa(&["sensitivity"]).status.code(), Some(1));
    assert_eq!(etpa(&["sensitivity", "--builtin", "nope"]).status.code(), Some(1));
    let o = etpa(&["sensitivity", "--config", "/definitely/missing.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));
    assert_eq!(etpa(&["sensitivity", "--builtin", "geneva", "--eta", "1.5"]).status.code(), Some(1));
}

#[test]
fn compute_failure_exits_two() {
    let o = etpa(&["optimize", "gate", "--builtin", "oregon_cw"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_one() {
    let o = etpa(&["sensitivity", "--builtin", "geneva", "-o", "/definitely/missing/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_has_header_and_expected_bounds() {
    let o = etpa(&["sensitivity", "--builtin", "geneva", "--scheme", "separation", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("label,scheme,eta,sigma_c_gm,"));
    let sigma: f64 = column(&o, "sigma_c_gm")[0].parse().unwrap();
    assert!(close(sigma, 3.07e3, 0.01), "{sigma}");

    let o = etpa(&[
        "sensitivity",
        "--builtin",
        "geneva",
        "--scheme",
        "attenuation",
        "--eta",
        "0.5",
        "--format",
        "csv",
    ]);
    let sigma: f64 = column(&o, "sigma_c_gm")[0].parse().unwrap();
    assert!(close(sigma, 1.23e4, 0.01), "{sigma}");
}

#[test]
fn json_lines_parse() {
    let o = etpa(&["sensitivity", "--all-builtin", "--format", "json-lines"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7 * 3);
    assert!(lines.iter().all(|v| v["sigma_c_gm"].as_f64().unwrap() > 0.0));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = ["sensitivity", "--builtin", "oregon", "--format", "csv"];
    let direct = etpa(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["-o", path.to_str().unwrap()]);
    assert!(etpa(&with_file).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&direct));
}

#[test]
fn table_tolerance_controls_exit_code() {
    let o = etpa(&["table", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(csv_rows(&o).len(), 7);
    let within = column(&o, "within_tolerance");
    let labels = column(&o, "label");
    for (l, w) in labels.iter().zip(&within) {
        assert_eq!(w == "true", l != "this work", "{l}");
    }
    assert_eq!(etpa(&["table", "--tolerance", "0.01"]).status.code(), Some(3));
    assert_eq!(etpa(&["table", "--tolerance", "0.5"]).status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--builtin", "geneva", "--trials", "3000", "--seed", "7", "--format", "csv"];
    let a = etpa(&args);
    let b = etpa(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let other =
        etpa(&["simulate", "--builtin", "geneva", "--trials", "3000", "--seed", "8", "--format", "csv"]);
    assert_ne!(stdout(&a), stdout(&other));
}

#[test]
fn sweep_point_equals_sensitivity() {
    let s = etpa(&["sensitivity", "--builtin", "boulder_fs", "--format", "csv"]);
    let w = etpa(&[
        "sweep",
        "--builtin",
        "boulder_fs",
        "--param",
        "T_int",
        "--values",
        "0.75h",
        "--schemes",
        "separation,probabilistic,attenuation",
        "--format",
        "csv",
    ]);
    assert!(w.status.success());
    assert_eq!(column(&w, "value")[0].parse::<f64>().unwrap(), 2700.0);
    assert_eq!(column(&w, "unit")[0], "s");
    assert_eq!(column(&s, "sigma_c_gm"), column(&w, "sigma_c_gm"));
}

#[test]
fn sweep_ranges() {
    let o = etpa(&[
        "sweep",
        "--builtin",
        "geneva",
        "--param",
        "N_P",
        "--log-range",
        "1e-3:1:4",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&o).len(), 4 * 3);
    let o = etpa(&[
        "sweep",
        "--builtin",
        "geneva",
        "--param",
        "f_dark",
        "--range",
        "0:100:3",
        "--schemes",
        "separation",
        "--format",
        "csv",
    ]);
    let values: Vec<f64> = column(&o, "value").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(values, [0.0, 50.0, 100.0]);
    let bounds: Vec<f64> = column(&o, "sigma_c_gm").iter().map(|s| s.parse().unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(
        etpa(&["sweep", "--builtin", "geneva", "--param", "label", "--values", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        etpa(&["sweep", "--builtin", "geneva", "--param", "eta_d", "--values", "2"]).status.code(),
        Some(1)
    );
}

#[test]
fn ladder_reaches_target_for_boulder_fs() {
    let o = etpa(&["ladder", "--builtin", "boulder_fs", "--format", "csv"]);
    assert!(o.status.success());
    let steps = column(&o, "step");
    assert_eq!(steps, ["baseline", "best_method", "time_gating", "fourier_limit", "zero_dark"]);
    assert_eq!(column(&o, "meets_target").last().unwrap(), "true");
    let bounds: Vec<f64> = column(&o, "sigma_c_gm").iter().map(|s| s.parse().unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn optimal_eta_near_half_for_geneva() {
    let o = etpa(&["optimize", "eta", "--builtin", "geneva", "--format", "csv"]);
    let eta: f64 = column(&o, "eta_opt")[0].parse().unwrap();
    assert!((eta - 0.5).abs() < 0.01, "{eta}");
}

#[test]
fn gate_optimization_never_hurts() {
    let o = etpa(&["optimize", "gate", "--builtin", "boulder_fs", "--format", "csv"]);
    assert!(o.status.success());
    let gated: f64 = column(&o, "sigma_c_gm")[0].parse().unwrap();
    let ungated: f64 = column(&o, "ungated_sigma_c_gm")[0].parse().unwrap();
    assert!(gated <= ungated);
}

#[test]
fn curve_rows_cover_grid() {
    let o = etpa(&["curve", "--builtin", "geneva", "--points", "5", "--trials", "500", "--format", "csv"]);
    assert!(o.status.success());
    let f: Vec<f64> = column(&o, "detect_fraction").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(f.len(), 5);
    assert!(f[4] > f[0]);
}
