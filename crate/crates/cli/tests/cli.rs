use std::process::Command as Process;

use liemetric::io::FeasibilityDocument;
use liemetric::metrizability::FeasibilityStatus;
use liemetric_cli::{run, Command, RunConfig, EXIT_INPUT, EXIT_OK};

fn parse(args: &[&str]) -> RunConfig {
    RunConfig::parse_from_args(std::iter::once("liemetric").chain(args.iter().copied())).unwrap()
}

fn last_row(csv: &str) -> Vec<f64> {
    csv.lines().last().unwrap().split(',').map(|s| s.parse().unwrap()).collect()
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_liemetric")).args(args).output().unwrap()
}

#[test]
fn metrize_heisenberg_reports_certificate() {
    let out = run(&parse(&["metrize", "heisenberg3"]));
    assert_eq!(out.exit_code, EXIT_OK);
    let doc = FeasibilityDocument::from_json(&out.stdout).unwrap();
    assert_eq!(doc.status, FeasibilityStatus::Infeasible);
    assert_eq!(doc.certificate, Some(vec![0.0, 0.0, 1.0]));
    assert_eq!(doc.seed, 42);
}

#[test]
fn metrize_so3_reports_witness() {
    let out = run(&parse(&["metrize", "so3", "--seed", "3"]));
    let doc = FeasibilityDocument::from_json(&out.stdout).unwrap();
    assert_eq!(doc.status, FeasibilityStatus::Feasible);
    assert_eq!(doc.seed, 3);
    let w = doc.witness.unwrap();
    for (i, x) in w.iter().enumerate() {
        let want = if i % 4 == 0 { 1.0 } else { 0.0 };
        assert!((x - want).abs() <= 1e-9, "{w:?}");
    }
}

#[test]
fn geodesic_heisenberg_matches_polynomial_exponential() {
    let out = run(&parse(&["geodesic", "heisenberg3", "--alpha", "1,1,0", "--t-end", "1", "--steps", "1000"]));
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.stdout.starts_with("t,x_11,x_12,x_13,"));
    assert_eq!(out.stdout.lines().count(), 1002);
    let row = last_row(&out.stdout);
    // exp(X + Y) = I + E12 + E23 + ½E13
    let exact = [1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
    assert_eq!(row[0], 1.0);
    for (got, want) in row[1..10].iter().zip(exact) {
        assert!((got - want).abs() <= 1e-8, "{row:?}");
    }
}

#[test]
fn go_demo_straight_line() {
    let out = run(&parse(&["go-demo", "--kappa", "0", "--v", "1,2", "--t-end", "3"]));
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.stdout.starts_with("t,x1,x2,v1,v2,speed\n"));
    assert!(out.stderr.contains("\"verdict\": \"Metrizable\""));
    let row = last_row(&out.stdout);
    assert_eq!(row[0], 3.0);
    assert!((row[1] - 3.0).abs() <= 1e-12 && (row[2] - 6.0).abs() <= 1e-12, "{row:?}");
}

#[test]
fn go_demo_to_file_puts_verdict_on_stdout() {
    let path = std::env::temp_dir().join(format!("liemetric-go-{}.csv", std::process::id()));
    let out = run(&parse(&["go-demo", "--kappa", "1", "--t-end", "3.141592653589793", "--steps", "2000", "--out", path.to_str().unwrap()]));
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(out.stdout.contains("NotInvariantMetrizable"));
    let row = last_row(&csv);
    assert!(row[1].abs() <= 1e-7 && (row[2] - 2.0).abs() <= 1e-7, "{row:?}");
}

#[test]
fn algebra_file_input() {
    let path = std::env::temp_dir().join(format!("liemetric-alg-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"dim": 2, "labels": ["A", "B"], "brackets": [{"i": 1, "j": 2, "k": 2, "value": 1.0}]}"#,
    )
    .unwrap();
    let check = run(&parse(&["check", path.to_str().unwrap()]));
    let metrize = run(&parse(&["metrize", path.to_str().unwrap()]));
    std::fs::remove_file(&path).unwrap();
    assert_eq!(check.exit_code, EXIT_OK);
    assert!(check.stdout.contains("jacobi_residual: 0e0"));
    // the affine algebra [A, B] = B has no invariant scalar product
    let doc = FeasibilityDocument::from_json(&metrize.stdout).unwrap();
    assert_eq!(doc.status, FeasibilityStatus::Infeasible);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(run(&RunConfig::for_command(Command::Metrize)).exit_code, EXIT_INPUT);
    assert_eq!(run(&parse(&["metrize", "no-such-algebra"])).exit_code, EXIT_INPUT);
    assert_eq!(run(&parse(&["geodesic", "so3", "--alpha", "1,2"])).exit_code, EXIT_INPUT);
    assert_eq!(run(&parse(&["metrize", "so3", "--format", "csv"])).exit_code, EXIT_INPUT);
    let mut config = parse(&["go-demo"]);
    config.t_end = f64::NAN;
    assert_eq!(run(&config).exit_code, EXIT_INPUT);
    assert!(RunConfig::parse_from_args(["liemetric", "frobnicate"]).is_err());
    assert!(RunConfig::parse_from_args(["liemetric", "geodesic", "--steps", "0"]).is_err());
}

#[test]
fn binary_exit_codes() {
    assert_eq!(binary(&["metrize", "e2"]).status.code(), Some(0));
    assert_eq!(binary(&["metrize", "missing.json"]).status.code(), Some(1));
    assert_eq!(binary(&["unknown-command"]).status.code(), Some(1));
    assert_eq!(binary(&["--help"]).status.code(), Some(0));
    let neg = binary(&["go-demo", "--kappa", "-1", "--v", "-1,0.5", "--steps", "10"]);
    assert_eq!(neg.status.code(), Some(0));
}

#[test]
fn verify_is_byte_identical() {
    let first = binary(&["verify", "--seed", "42"]);
    let second = binary(&["verify", "--seed", "42"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 13);
}
