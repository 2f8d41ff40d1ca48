use serde_json::Value;
use std::io::Write;
use std::process::Command;

fn run(args: &[&str]) -> (Value, i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_equispec")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 report");
    let doc: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("report is not JSON ({e}): {text}"));
    let code = out.status.code().expect("exit code");
    assert_eq!(doc["exit_status"], code, "exit_status field matches the process status");
    (doc, code, text)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn lens_example() {
    let (doc, code, _) = run(&["lens-eta", "--m", "6", "--rot", "1,5", "--ell", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["exact"], "-2/1");
    assert!((f(&doc["results"]["numeric"]) + 2.0).abs() < 1e-12);
    assert!(f(&doc["results"]["residual"]) <= 1e-12);
    assert_eq!(doc["results"]["input"]["m"], 6);
}

#[test]
fn lens_table_without_ell() {
    let (doc, code, _) = run(&["lens-eta", "--m", "6", "--rot", "1,5"]);
    assert_eq!(code, 0);
    let exact: Vec<&str> = doc["results"]["table"].as_array().unwrap().iter().map(|r| r["exact"].as_str().unwrap()).collect();
    assert_eq!(exact, ["0/1", "-2/3", "-5/3", "-2/1", "-5/3", "-2/3"]);
}

#[test]
fn non_free_rotation_is_a_validation_error() {
    let (doc, code, _) = run(&["lens-eta", "--m", "6", "--rot", "1,2", "--ell", "1"]);
    assert_eq!(code, 2);
    assert!(doc["diagnostics"]["error"].as_str().unwrap().contains("rotation 2"));
    assert_eq!(doc["results"], Value::Null);
}

#[test]
fn eta_example() {
    let (doc, code, _) = run(&["eta", "--model", "circle", "--a", "0.25", "--route", "hurwitz"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["eta0"], 0.5);
    assert_eq!(doc["results"]["route"], "hurwitz");
}

#[test]
fn eta_routes_agree() {
    for route in ["mellin", "kroute"] {
        let (doc, code, _) = run(&["eta", "--a", "0.1", "--route", route]);
        assert_eq!(code, 0, "{route}");
        assert!((f(&doc["results"]["eta0"]) - 0.8).abs() < 1e-5, "{route}: {}", doc["results"]);
    }
    let (doc, _, _) = run(&["eta", "--a", "0.25", "--k", "3", "--rho", "1"]);
    assert!((f(&doc["results"]["eta0"]) - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn eta_validation() {
    assert_eq!(run(&["eta", "--a", "1.5"]).1, 2);
    assert_eq!(run(&["eta"]).1, 2);
    assert_eq!(run(&["eta", "--a", "0.25", "--route", "series"]).1, 2);
    assert_eq!(run(&["eta", "--a", "0.25", "--z", "1", "--route", "mellin"]).1, 2);
    assert_eq!(run(&["eta", "--a", "0.25", "--probe-t", "-1"]).1, 2);
}

#[test]
fn eta_probe() {
    let (doc, code, _) = run(&["eta", "--a", "0.25", "--probe-t", "0.2,1"]);
    assert_eq!(code, 0);
    let probes = doc["results"]["probe"].as_array().unwrap();
    assert_eq!(probes.len(), 2);
    for p in probes {
        assert!(f(&p["k_prime_residual"]) <= 1e-7);
    }
}

#[test]
fn mckean_singer_example() {
    let (doc, code, _) = run(&["mckean-singer", "--plus-ker", "2", "--minus-ker", "1", "--paired", "1,2,3", "--t", "0.01,10"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["index"], 1);
    assert!(f(&doc["results"]["spread"]) < 1e-12);
}

#[test]
fn euler_and_dolbeault() {
    let (doc, _, _) = run(&["euler"]);
    assert_eq!(doc["results"]["table"], serde_json::json!({"0": 2, "1": -1, "2": 0, "3": -1}));
    let (doc, _, _) = run(&["euler", "--manifold", "sphere", "--n", "3", "--mode", "latitude", "--rho", "xi"]);
    assert_eq!(doc["results"]["table"]["xi"], -1);
    let (doc, _, _) = run(&["dolbeault", "--n", "2", "--j", "1"]);
    assert_eq!(doc["results"]["index"], -1);
    let (doc, _, _) = run(&["dolbeault", "--n", "3", "--j", "2", "--rho", "nontrivial"]);
    assert_eq!(doc["results"]["index"], 0);
    assert_eq!(run(&["dolbeault", "--n", "3", "--j", "4"]).1, 2);
}

#[test]
fn euler_from_action_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"order": 4, "degrees": [[[1]], [[0, -1], [1, 0]], [[1]]]}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let (doc, code, _) = run(&["euler", "--manifold", "action", "--action-file", path]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["table"], serde_json::json!({"0": 2, "1": -1, "2": 0, "3": -1}));
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, r#"{{"order": 2, "degrees": [[[0, -1], [1, 0]]]}}"#).unwrap();
    assert_eq!(run(&["euler", "--manifold", "action", "--action-file", bad.path().to_str().unwrap()]).1, 2);
}

#[test]
fn heat_fit_generated_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("samples.csv");
    let (doc, code, _) =
        run(&["heat-fit", "--model", "circle-laplacian", "--write-samples", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let lead = f(&doc["results"]["leading"]);
    assert!((lead - std::f64::consts::PI.sqrt()).abs() < 1e-4);
    assert!(f(&doc["results"]["max_log_coeff"]) < 1e-6);
    let (from_csv, code, _) = run(&["heat-fit", "--samples", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(from_csv["results"], doc["results"]);
    let (doc, _, _) = run(&["heat-fit", "--model", "circle-laplacian", "--k", "3", "--rho", "0"]);
    assert!((f(&doc["results"]["leading"]) - std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-4);
}

#[test]
fn ill_conditioned_fit_is_a_numeric_failure() {
    let (doc, code, _) = run(&["heat-fit", "--model", "circle-laplacian", "--t-range", "1e-3,1.001e-3", "--i-min", "-2"]);
    assert_eq!(code, 3, "{}", doc["diagnostics"]);
    assert!(doc["diagnostics"]["error"].as_str().unwrap().contains("condition"));
}

#[test]
fn aps_check_examples() {
    let (doc, _, _) = run(&["aps-check", "--index", "1", "--h", "0", "--eta", "-2", "--c0", "0"]);
    assert_eq!(doc["results"]["residual"], 0.0);
    let (doc, _, _) = run(&["aps-check", "--index", "0", "--h", "2", "--eta", "-2", "--c0", "0"]);
    assert_eq!(doc["results"]["residual"], 0.0);
    let (doc, code, _) = run(&["aps-check", "--pipeline", "--a", "0.25"]);
    assert_eq!(code, 0);
    assert!(f(&doc["results"]["residual"]) <= 1e-4);
}

#[test]
fn weyl_exponents() {
    let (doc, _, _) = run(&["weyl", "--model", "torus", "--cutoff", "60"]);
    assert!((f(&doc["results"]["exponent"]) - 1.0).abs() <= 0.05);
    let (doc, _, _) = run(&["weyl", "--model", "circle", "--cutoff", "500", "--count", "10"]);
    assert!((f(&doc["results"]["exponent"]) - 0.5).abs() <= 0.05);
    assert_eq!(doc["results"]["counts"][0]["count"], 6);
}

#[test]
fn unknown_flags_and_subcommands_rejected() {
    assert_eq!(run(&["lens-eta", "--m", "6", "--rot", "1,5", "--bogus", "1"]).1, 2);
    assert_eq!(run(&["frobnicate"]).1, 2);
}

#[test]
fn config_merges_under_explicit_flags() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"m": 6, "rot": [1, 5], "ell": 2}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let (doc, _, _) = run(&["--config", path, "lens-eta"]);
    assert_eq!(doc["results"]["exact"], "-5/3");
    let (doc, _, _) = run(&["lens-eta", "--config", path, "--ell", "3"]);
    assert_eq!(doc["results"]["exact"], "-2/1");
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, r#"{{"nonsense": 1}}"#).unwrap();
    assert_eq!(run(&["dolbeault", "--n", "2", "--config", bad.path().to_str().unwrap()]).1, 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["eta", "--a", "0.4", "--route", "kroute"];
    assert_eq!(run(&args).2, run(&args).2);
    let args = ["selftest"];
    assert_eq!(run(&args).2, run(&args).2);
}

#[test]
fn selftest_fast_passes() {
    let (doc, code, _) = run(&["selftest", "fast"]);
    assert_eq!(code, 0, "{}", doc["diagnostics"]);
    assert_eq!(doc["results"]["failed"], 0);
}

#[test]
fn selftest_full_passes() {
    let (doc, code, _) = run(&["selftest", "full"]);
    assert_eq!(code, 0, "{}", doc["diagnostics"]);
    assert!(doc["results"]["passed"].as_u64().unwrap() > 40);
}

#[test]
fn corrupted_golden_names_the_case() {
    let golden = include_str!("../src/golden.json").replace(r#""eta": "-5/3""#, r#""eta": "-4/3""#);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(golden.as_bytes()).unwrap();
    let (doc, code, _) = run(&["selftest", "--golden", file.path().to_str().unwrap()]);
    assert_eq!(code, 3);
    let failures: Vec<&str> = doc["diagnostics"]["failures"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(failures, ["lens m=6 rot=[1, 5] ell=2", "lens m=6 rot=[1, 5] ell=4"]);

    let mut truncated = tempfile::NamedTempFile::new().unwrap();
    truncated.write_all(&golden.as_bytes()[..40]).unwrap();
    let (doc, code, _) = run(&["selftest", "--golden", truncated.path().to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(doc["diagnostics"]["failures"][0], "golden file");
}

#[test]
fn every_subcommand_is_reachable() {
    let invocations: [&[&str]; 9] = [
        &["eta", "--a", "0.3"],
        &["lens-eta", "--m", "5", "--rot", "1,2", "--ell", "1"],
        &["euler", "--rho", "2"],
        &["dolbeault", "--n", "4"],
        &["heat-fit", "--model", "torus", "--t-range", "1e-2,1e-1", "--i-min", "-2", "--i-max", "1", "--j-max", "0"],
        &["mckean-singer", "--plus-ker", "1", "--paired", "0.5"],
        &["aps-check", "--index", "2", "--eta", "0", "--c0", "2"],
        &["weyl", "--model", "circle-laplacian", "--cutoff", "200"],
        &["selftest"],
    ];
    for args in invocations {
        let (doc, code, _) = run(args);
        assert_eq!(code, 0, "{args:?}: {}", doc["diagnostics"]);
        assert_eq!(doc["command"]["subcommand"], args[0]);
    }
}
