//! Black-box tests of the pfx binary: exit-code contract, output shapes,
//! and byte determinism of artifacts.

use std::process::{Command, Output};

fn pfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_exit_code_contract() {
    let ok = pfx(&["eval", "cdi", "--x1", "0.5", "--x2", "0.5", "--a", "0", "--lambda", "5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let s = stdout(&ok);
    assert!(s.contains("\"status\": \"Converged\""));
    assert!(s.contains("\"series_value\": \"3.1415926535897931e0"));

    let dom = pfx(&["eval", "cdi", "--x1", "0.5", "--x2", "0.5", "--a", "0", "--lambda", "-1"]);
    assert_eq!(dom.status.code(), Some(2));
    assert!(stdout(&dom).contains("DomainViolation"));

    let pole = pfx(&["eval", "cdi", "--x1", "-1", "--x2", "0.5", "--a", "0", "--lambda", "5"]);
    assert_eq!(pole.status.code(), Some(3));

    let usage = pfx(&["eval", "nosuch"]);
    assert_eq!(usage.status.code(), Some(1));
    let missing = pfx(&["eval", "cdi", "--x1", "0.5"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn eval_accepts_rational_and_complex_literals() {
    let out = pfx(&[
        "eval", "tvd", "--x", "1/3,1/3,1/3", "--u", "1", "--lambda", "1/3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("\"series_value\": \"7.7431696195"));

    let out = pfx(&[
        "eval", "cdi", "--x1", "0.5+0.25i", "--x2", "1/2", "--a", "1/4", "--lambda", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_finite_shapes_and_codes() {
    let out = pfx(&["verify-finite", "cbi", "--count", "20", "--n-max", "8", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("\"pass\": true"));
    assert!(s.contains("\"count\": 20"));

    // n = 0 is the trivial single-residue case
    let out = pfx(&["verify-finite", "bpf", "--count", "1", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(0));

    let out = pfx(&["verify-finite", "gpf", "--r", "3", "--count", "10", "--n-max", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = pfx(&["verify-finite", "nosuch"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pi_table_has_header_and_baselines() {
    let out = pfx(&["pi"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "m,n,a,lambda,value,rel_err_vs_pi,terms_used,tail_bound");
    assert!(s.contains("0,0,0,1/2,"));
    assert!(s.contains("0,0,0,inf,"));

    let out = pfx(&["pi", "--pi-squared", "--lambda", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.starts_with("k,term,euler_term\n"));
    // per-term column matches 4/(2k+1)² at λ=1/2
    let row1 = s.lines().nth(2).unwrap(); // k=1
    let fields: Vec<&str> = row1.split(',').collect();
    assert_eq!(fields[0], "1");
    assert!(fields[1].starts_with("4.4444444444444"));
    assert!(fields[2].starts_with("4.4444444444444"));
}

#[test]
fn convergence_trace_and_exponent() {
    let out = pfx(&["convergence", "gapf", "--x1", "0.5", "--x2", "3/2", "--n-max", "2048"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.starts_with("k,abs_term,abs_partial_err\n"));
    let tail = s.lines().last().unwrap();
    assert!(tail.starts_with("# fitted_exponent="));
    let p: f64 = tail.trim_start_matches("# fitted_exponent=").parse().unwrap();
    assert!((p - 2.5).abs() < 0.3, "{p}"); // 1 + Re(x₂)
}

#[test]
fn sweep_grid_rows() {
    let out = pfx(&[
        "sweep", "cdi", "--x1", "0.5", "--x2", "0.5", "--a", "0", "--lambda-start", "1",
        "--lambda-end", "5", "--steps", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert_eq!(s.lines().count(), 6); // header + 5 grid points
    assert!(s.lines().skip(1).all(|l| l.ends_with("Converged")));
}

#[test]
fn out_flag_matches_stdout_bytes() {
    let dir = std::env::temp_dir().join("pfx-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eval.json");
    let args = ["eval", "cdi", "--x1", "0.5", "--x2", "0.5", "--a", "0", "--lambda", "5"];
    let direct = pfx(&args);
    let mut with_out: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    with_out.push("--out".into());
    with_out.push(path.to_str().unwrap().into());
    let redirected = Command::new(env!("CARGO_BIN_EXE_pfx")).args(&with_out).output().unwrap();
    assert_eq!(redirected.status.code(), Some(0));
    assert!(redirected.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}
