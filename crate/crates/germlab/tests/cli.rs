use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn germlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_germlab")).args(args).env_remove("GERMLAB_SEED").output().unwrap()
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = germlab(&all);
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), report)
}

#[test]
fn germ_check_on_generated_fixture() {
    let (code, r) = json_report(&["germ-check", "--spec", &fixture("z2_germ.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], "germlab.report.v1");
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["conditional"]["positive"], true);
    assert_eq!(r["result"]["dissipator"]["positive"], true);
}

#[test]
fn germ_check_rejects_invalid_fixture() {
    let (code, r) = json_report(&["germ-check", "--spec", &fixture("invalid_germ.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["conditional"]["positive"], false);
    assert_eq!(r["result"]["agree"], true);
}

#[test]
fn dilate_invalid_fixture_reports_negative_dissipator() {
    let (code, r) = json_report(&["dilate", "--spec", &fixture("invalid_germ.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["failure"]["kind"], "NegativeDissipator");
    assert!((r["failure"]["min_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn dilate_generated_fixture() {
    let (code, r) = json_report(&["dilate", "--spec", &fixture("z2_germ.json")]);
    assert_eq!(code, 0, "{r:#}");
    let rows = r["result"]["residuals"].as_array().unwrap();
    assert!(rows.iter().any(|c| c["name"] == "derivation"));
    assert!(r["result"]["pseudo_hilbert"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn sim_exp_poisson_gives_e() {
    let (code, r) = json_report(&["sim-exp", "--kind", "poisson", "--element", "1", "--horizon", "1", "--batch", "100000", "--seed", "42"]);
    assert_eq!(code, 0);
    let cf = r["result"]["closed_form"][0].as_f64().unwrap();
    assert!((cf - std::f64::consts::E).abs() < 1e-12);
    assert_eq!(r["params"]["seed"], 42);
    assert_eq!(r["params"]["batch"], 100000);
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_germlab"))
        .args(["sim-moments", "--kind", "poisson", "--batch", "200", "--json"])
        .env("GERMLAB_SEED", "9")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["params"]["seed"], 9);
    let (_, flagged) = json_report(&["sim-moments", "--kind", "poisson", "--batch", "200", "--seed", "9"]);
    assert_eq!(r, flagged);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["kernel-check", "--kind", "wiener", "--elements", "0,1;0.5,-1;1+0.5i,0", "--time", "0.1", "--seed", "3", "--json"];
    let a = germlab(&args);
    let b = germlab(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["verify-algebra", "--spec", &fixture("newton.json"), "--json"];
    let stdout = germlab(&args).stdout;
    let out = germlab(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn verify_and_gns_on_every_canonical_fixture() {
    for name in ["newton.json", "wiener.json", "poisson.json"] {
        let (code, _) = json_report(&["verify-algebra", "--spec", &fixture(name)]);
        assert_eq!(code, 0, "{name}");
        let (code, r) = json_report(&["gns", "--spec", &fixture(name)]);
        assert_eq!(code, 0, "{name}");
        let expected_dim_k = if name == "newton.json" { 0 } else { 1 };
        assert_eq!(r["result"]["dim_k"], expected_dim_k, "{name}");
    }
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("t.json");
    std::fs::write(&truncated, "{\"semigroup\": {").unwrap();
    let (code, r) = json_report(&["germ-check", "--spec", truncated.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["failure"]["kind"], "ParseError");

    let (code, r) = json_report(&["dilate", "--spec", "/nonexistent/germ.json"]);
    assert_eq!(code, 2);
    assert_eq!(r["failure"]["kind"], "IoError");

    let (code, r) = json_report(&["sim-exp", "--kind", "wiener", "--element", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["failure"]["kind"], "InputError");

    let (code, r) = json_report(&["sim-exp", "--spec", &fixture("z2_germ.json"), "--element", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["failure"]["kind"], "SchemaError");

    let (code, r) = json_report(&["sim-moments", "--kind", "newton", "--step", "2"]);
    assert_eq!(code, 2);
    assert_eq!(r["failure"]["kind"], "BadStep");

    // clap usage errors
    assert_eq!(germlab(&["sim-moments"]).status.code(), Some(2));
    assert_eq!(germlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(germlab(&["sim-moments", "--kind", "levy"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_1_with_summary() {
    let out = germlab(&["germ-check", "--spec", &fixture("invalid_germ.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "germ-check: fail");
}
