use std::process::{Command, Output};

use halfspace::geometry::HalfSpacePoint;
use halfspace::quadrature::{dirichlet_d, BoundaryData, QuadratureSpec};

fn halfspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfspace"))
        .args(args)
        .env_remove("HALFSPACE_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn kernel_table_has_one_row_per_point() {
    let o = halfspace(&["eval", "--kernel", "KM", "--lambda", "1.5", "--M", "2", "--n", "3", "--r", "0.5,2", "--theta", "0,0.7,1.2", "--yp", "1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["r", "theta", "x", "value"]);
    assert_eq!(rd.records().count(), 6);
}

#[test]
fn invalid_lambda_is_a_usage_error_without_output() {
    let o = halfspace(&["eval", "--kernel", "KM", "--lambda", "-0.5", "--yp", "1,0"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(o.stdout.is_empty());
    let o = halfspace(&["eval", "--kernel", "KM", "--lambda", "0", "--yp", "1,0"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(o.stdout.is_empty());
    assert_eq!(halfspace(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn solution_values_match_the_library_exactly() {
    let o = halfspace(&[
        "eval", "--solution", "u", "--M", "0", "--data", "bump", "--data-param", "center=2.5,1", "--data-param", "radius=1",
        "--r", "1,3", "--theta", "0.5", "--abs-tol", "1e-10", "--rel-tol", "1e-10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let f = BoundaryData::bump(&[2.5, 1.0], 1.0, 1.0).unwrap();
    let spec = QuadratureSpec::default().with_tolerances(1e-10, 1e-10);
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    for (rec, r) in rd.records().zip([1.0, 3.0]) {
        let rec = rec.unwrap();
        let x = HalfSpacePoint::on_first_axis(3, r, 0.5).unwrap();
        let lib = dirichlet_d(&f, &x, &spec).unwrap();
        assert_eq!(rec[3].parse::<f64>().unwrap(), lib.value);
        assert_eq!(rec[4].parse::<f64>().unwrap(), lib.error);
    }
}

#[test]
fn csv_and_json_round_trip() {
    let args = ["eval", "--kernel", "KMtilde", "--lambda", "0.5", "--M", "3", "--r", "0.3,7,1e6", "--theta", "0.1,1.4", "--yp", "1e-3,2"];
    let csv_out = halfspace(&args);
    let json_out = halfspace(&[&args[..], &["--format", "json"]].concat());
    let mut rd = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let from_csv: Vec<f64> = rd.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    let from_json: Vec<f64> = stdout(&json_out)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["value"].as_f64().unwrap())
        .collect();
    assert_eq!(from_csv.len(), 6);
    assert_eq!(from_csv, from_json);
}

#[test]
fn expansion_table_has_both_paths() {
    let o = halfspace(&["expand", "--problem", "neumann", "--data", "exp_decay", "--M", "3", "--r", "20", "--theta", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    let recs: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    let coeffs: Vec<_> = recs.iter().filter(|r| &r[0] == "coefficient").collect();
    assert_eq!(coeffs.len(), 3);
    for c in coeffs {
        let q: f64 = c[4].parse().unwrap();
        let closed: f64 = c[6].parse().unwrap();
        assert!((q - closed).abs() <= 1e-8 * closed.abs().max(1.0));
    }
}

#[test]
fn zero_order_remainder_is_the_integral() {
    let o = halfspace(&["expand", "--problem", "dirichlet", "--data", "exp_decay", "--M", "0", "--r", "5", "--theta", "0.4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let row: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(row["remainder"], row["direct"]);
}

#[test]
fn divergence_table_marks_the_onset() {
    let o = halfspace(&["expand", "--divergence", "--r", "10", "--theta", "0", "--k-max", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 32);
    assert_eq!(out.lines().filter(|l| l.ends_with(",true")).count(), 1);
}

#[test]
fn verify_is_seeded_and_reproducible() {
    let a = halfspace(&["verify", "prop31", "--seed", "42"]);
    let b = halfspace(&["verify", "prop31", "--seed", "42", "--jobs", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<_> = stdout(&a).lines().map(String::from).collect();
    assert_eq!(lines.len(), 8 * 2 * 4);
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
}

#[test]
fn verify_sharpness_reports_measured_constants() {
    let o = halfspace(&["verify", "sharpness"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for key in ["\"d4\"", "\"d8\"", "\"d9\""] {
        assert!(out.contains(key), "missing {key}");
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(halfspace(&["verify", "everything"]).status.code(), Some(64));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# kernel settings\nkernel=KM\nlambda=1.5\nM=2\nyp=1,0.5\nr=0.5,2\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = halfspace(&["eval", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    // Flags override the file.
    let o = halfspace(&["eval", "--config", cfg.to_str().unwrap(), "--r", "1"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}
