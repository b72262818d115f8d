//! End-to-end runs of the `cutofflab` binary: output schemas, closed-form
//! values, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cutofflab"));
    c.env_remove("CUTOFFLAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Two-state chain `[[1−a, a], [b, 1−b]]` as JSON.
fn two_state(dir: &Path, a: f64, b: f64, time: &str) -> String {
    let body = format!(
        r#"{{"states": ["x", "y"], "kernel": [[{}, {a}], [{b}, {}]], "time_kind": "{time}"}}"#,
        1.0 - a,
        1.0 - b
    );
    write(dir, &format!("two-{time}.json"), &body)
}

#[test]
fn hypercube_curve_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    ok(&["curve", "--zoo", "hypercube", "--n", "8", "--spec", "tv", "--tmax", "40", "--dt", "0.1", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 402);
    // from a corner at t = 0 the TV distance to uniform is 1 − 2^{-8}
    assert_eq!(lines[1], format!("0,{}", 1.0 - 1.0 / 256.0));
    assert!(lines[400].starts_with("39.9,"));
    let vals: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn curve_per_state_matches_two_state_formula() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (0.3, 0.1);
    let chain = two_state(dir.path(), a, b, "continuized");
    let csv = ok(&["curve", "--chain", &chain, "--spec", "tv", "--tmax", "2", "--dt", "0.5", "--state", "all"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,value,state"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let t: f64 = f[0].parse().unwrap();
        let v: f64 = f[1].parse().unwrap();
        // |P_t(x,x) − π(x)| = π(other) e^{−(a+b)t}
        let other = if f[2] == "x" { a / (a + b) } else { b / (a + b) };
        let expected = other * (-(a + b) * t).exp();
        assert!((v - expected).abs() < 1e-12, "{line}: expected {expected}");
    }
}

#[test]
fn spectral_two_state() {
    let dir = tempfile::tempdir().unwrap();
    let chain = two_state(dir.path(), 0.3, 0.1, "discrete");
    let v: Value = serde_json::from_str(&ok(&["spectral", "--chain", &chain])).unwrap();
    for key in ["lambda", "kappa", "lambda_prime", "beta1", "gamma1", "eigenvalues"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["lambda"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((v["kappa"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert!((v["lambda_prime"].as_f64().unwrap() - (-(0.6f64).ln()).min(1.0)).abs() < 1e-12);
    let eig = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 2);
    assert!((eig[1]["re"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(eig[1]["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn constants_poincare_equals_gap() {
    let dir = tempfile::tempdir().unwrap();
    let chain = two_state(dir.path(), 0.3, 0.1, "continuized");
    let v: Value =
        serde_json::from_str(&ok(&["constants", "--chain", &chain, "--p", "2", "--kind", "poincare", "--seed", "3"]))
            .unwrap();
    assert_eq!(v["kind"], "poincare");
    assert_eq!(v["restarts"], 32);
    assert!((v["value"].as_f64().unwrap() - 0.4).abs() < 1e-6);
    assert!((v["lower_bound"].as_f64().unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn mixing_two_state_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (0.3, 0.1);
    let chain = two_state(dir.path(), a, b, "continuized");
    let v: Value = serde_json::from_str(&ok(&["mixing", "--chain", &chain, "--spec", "tv", "--eps", "0.25"])).unwrap();
    // worst start is y: TV = a/(a+b) e^{−(a+b)t}
    let expected = ((a / (a + b)) / 0.25).ln() / (a + b);
    let t = v["t"].as_f64().unwrap();
    assert!((t - expected).abs() <= 1e-5 * expected, "{t} vs {expected}");
    assert!(v["t_lo"].as_f64().unwrap() <= t && t <= v["t_hi"].as_f64().unwrap());
    assert_eq!(v["epsilon"], 0.25);

    let list: Value =
        serde_json::from_str(&ok(&["mixing", "--zoo", "hypercube-discrete", "--n", "6", "--eps", "0.4,0.1"])).unwrap();
    let arr = list.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for r in arr {
        assert_eq!(r["t_hi"].as_f64().unwrap() - r["t_lo"].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn family_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    ok(&[
        "family", "--zoo", "pak", "--base", "hypercube", "--cn", "1/(n*sqrt(ln n))", "--n", "25,50,100,200", "--spec",
        "tv", "--out", out.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["family", "spec", "thresholds", "table", "ratios", "verdict", "window"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["family"], "pak");
    assert_eq!(v["spec"], "tv");
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    for row in table {
        for key in ["n", "lambda", "kappa", "lambda_prime", "mix"] {
            assert!(row.get(key).is_some());
        }
        assert_eq!(row["mix"].as_object().unwrap().len(), 6);
    }
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 6);
    let help = ok(&["family", "--help"]);
    assert!(help.contains(header), "help does not document the CSV header {header}");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["family", "--zoo", "hypercube", "--n", "10,20,40,80", "--spec", "kl"];
    let a = ok(&args);
    let b = ok(&args);
    let threaded = bin().args(["--threads", "1"]).args(args).output().unwrap();
    let env = bin().env("CUTOFFLAB_THREADS", "3").args(args).output().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.as_bytes(), threaded.stdout.as_slice());
    assert_eq!(a.as_bytes(), env.stdout.as_slice());
}

#[test]
fn zoo_lists_families() {
    let v: Value = serde_json::from_str(&ok(&["zoo"])).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for name in ["hypercube", "hypercube-discrete", "pak", "product_example"] {
        assert!(names.contains(&name), "{name} missing from {names:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "2\n0.5 0.6\n0.5 0.5\n");
    let reducible = write(dir.path(), "red.txt", "2\n1 0\n0 1\n");
    assert_eq!(code(&["curve", "--zoo", "hypercube", "--n", "8", "--tmax", "4", "--spec", "bogus"]), 2);
    assert_eq!(code(&["curve", "--zoo", "nope", "--n", "8", "--tmax", "4"]), 2);
    assert_eq!(code(&["curve", "--zoo", "hypercube", "--tmax", "4"]), 2);
    assert_eq!(code(&["curve", "--chain", "/nonexistent/file.txt", "--tmax", "4"]), 2);
    assert_eq!(code(&["curve", "--chain", &bad, "--tmax", "4"]), 2);
    assert_eq!(code(&["spectral", "--chain", &reducible]), 2);
    assert_eq!(code(&["mixing", "--zoo", "hypercube", "--n", "8", "--eps", "1.5"]), 2);
    assert_eq!(code(&["mixing", "--zoo", "hypercube", "--n", "8", "--spec", "renyi:1", "--eps", "0.1"]), 2);
    assert_eq!(code(&["family", "--zoo", "pak", "--cn", "1/(n*sqrt(ln n)", "--n", "25,50,100,200"]), 2);
    assert_eq!(code(&["family", "--zoo", "pak", "--base", "cycle", "--n", "25,50,100,200"]), 2);
    assert_eq!(code(&["family", "--zoo", "hypercube", "--n", "50,25,100,200"]), 2);
    assert_eq!(code(&["curve", "--zoo", "hypercube-discrete", "--n", "8", "--tmax", "4", "--dt", "0.5"]), 2);
    assert_eq!(code(&["spectral", "--zoo", "hypercube", "--n", "40"]), 2);
    let env = bin().env("CUTOFFLAB_THREADS", "many").args(["zoo"]).output().unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // rounding in P_t keeps the dense curve near 1e-17, far above ε at the 64/λ horizon
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "c3.txt", "3\n0.5 0.3 0.2\n0.25 0.5 0.25\n0.1 0.4 0.5\n");
    let out = run(&["mixing", "--chain", &chain, "--eps", "1e-40"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
}

#[test]
fn quick_audit_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("audit.json");
    let stdout = ok(&["audit", "--seed", "7", "--quick", "--out", out.to_str().unwrap()]);
    assert!(stdout.lines().count() >= 8);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    for entry in v.as_array().unwrap() {
        assert_eq!(entry["violations"], 0);
    }
}
