use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sosdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_for_the_deltoid() {
    let o = sosdeg(&["bound", "--curve", "deltoid"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), r#"{"d":4,"p_a":3,"r":2,"k_curve":2,"k_degree_only":3}"#);
}

#[test]
fn toric_closed_forms_for_the_doubled_simplex() {
    let o = sosdeg(&["polygon", "--name", "simplex2", "--j", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), r#"{"d":8,"p_a":3,"two_pa_over_d":"3/4","r":1}"#);
}

#[test]
fn surface_schedules() {
    let v = json_of(&sosdeg(&["bound", "--surface", "minimal", "--j", "3"]));
    assert_eq!((v["multiplier_degree"].as_u64(), v["product_degree"].as_u64()), (Some(6), Some(12)));
    assert_eq!(v["margin"], 9);
    let v = json_of(&sosdeg(&["bound", "--surface", "p2", "--j", "4"]));
    assert_eq!((v["multiplier_degree"].as_u64(), v["product_degree"].as_u64()), (Some(4), Some(12)));
    assert_eq!(v["margin"], 5);
}

#[test]
fn deltoid_separator_then_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let sep = dir.path().join("sep.json");
    let o = sosdeg(&[
        "certify", "--curve", "deltoid", "--f", "deltoid-witness:2", "--j", "2", "--k", "1", "--json",
        path_str(&sep),
    ]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&sep).unwrap()).unwrap();
    assert_eq!(v["outcome"], "separator");
    assert_eq!(v["k"], 1);

    let verify = |path: &Path| {
        sosdeg(&[
            "separator-verify", "--curve", "deltoid", "--f", "deltoid-witness:2", "--witness", path_str(path),
        ])
    };
    let o = verify(&sep);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json_of(&o)["passed"], true);

    // flipping the functional breaks it
    let mut bad = v.clone();
    for c in bad["ell"]["coords"].as_array_mut().unwrap() {
        *c = Value::from(-c.as_f64().unwrap());
    }
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = verify(&bad_path);
    assert_eq!(code(&o), 1);
    assert_eq!(json_of(&o)["passed"], false);

    let cert = dir.path().join("cert.json");
    let o = sosdeg(&[
        "certify", "--curve", "deltoid", "--f", "deltoid-witness:2", "--k", "2", "--json", path_str(&cert),
    ]);
    assert_eq!(code(&o), 0);
    let o = verify(&cert);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json_of(&o)["kind"], "certificate");
}

#[test]
fn search_defaults_to_the_curve_bound() {
    let o = sosdeg(&["certify", "--curve", "deltoid", "--f", "deltoid-witness:2"]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["k_max"], 2);
    assert_eq!(v["min_certified_k"], 2);
    let kinds: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["outcome"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["separator", "separator", "certificate"]);
}

#[test]
fn form_from_file_and_sdp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("motzkin.json");
    std::fs::write(&f, sosdeg::io::poly_to_json(&sosdeg::curves::motzkin_form()).to_string()).unwrap();
    let dump = dir.path().join("dump.json");
    let o = sosdeg(&[
        "certify", "--curve", "p2", "--f", path_str(&f), "--k", "0", "--dump-sdp", path_str(&dump),
    ]);
    assert_eq!(code(&o), 2);
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(d[0]["problem"]["blocks"], serde_json::json!([1, 10]));
    assert_eq!(d[0]["outcome"]["outcome"], "separator");
    // a multiplier search on P² needs an explicit range
    assert_eq!(code(&sosdeg(&["certify", "--curve", "p2", "--f", "motzkin"])), 64);
    let o = sosdeg(&["certify", "--curve", "p2", "--f", "motzkin", "--kmax", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_of(&o)["min_certified_k"], 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["certify", "--curve", "deltoid", "--f", "deltoid-witness:2", "--k", "1"][..],
        &["harnack", "--polygon", "simplex", "--t", "3"][..],
        &["pointed", "--curve", "deltoid", "--j", "1"][..],
    ] {
        let a = sosdeg(args);
        let b = sosdeg(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn curve_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["deltoid", "quartic-triple-point", "p2", "empty-conic"] {
        let first = dir.path().join(format!("{name}.json"));
        let second = dir.path().join(format!("{name}-again.json"));
        let a = sosdeg(&["invariants", "--curve", name, "--out", path_str(&first)]);
        let b = sosdeg(&["invariants", "--curve", path_str(&first), "--out", path_str(&second)]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{name}");
    }
}

#[test]
fn harnack_cubic_has_one_solitary_point() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("cubic.json");
    let o = sosdeg(&["harnack", "--polygon", "simplex", "--t", "3", "--out", path_str(&curve)]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0]["kind"], "solitary");
    let inv = json_of(&sosdeg(&["invariants", "--curve", path_str(&curve)]));
    assert_eq!((inv["d"].as_u64(), inv["p_a"].as_i64()), (Some(3), Some(1)));

    let roots = dir.path().join("roots.json");
    std::fs::write(&roots, r#"[["1/4", "1/2", "3/4"], [1, "5/4", "3/2"], [2, "9/4", "5/2"]]"#).unwrap();
    let o = sosdeg(&["harnack", "--polygon", "simplex", "--t", "3", "--roots", path_str(&roots)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_of(&o)["pairs"].as_array().unwrap().len(), 1);
    std::fs::write(&roots, r#"[["1/4", "1/4", "3/4"], [1, "5/4", "3/2"], [2, "9/4", "5/2"]]"#).unwrap();
    let o = sosdeg(&["harnack", "--polygon", "simplex", "--t", "3", "--roots", path_str(&roots)]);
    assert_eq!(code(&o), 64);
}

#[test]
fn pointedness() {
    let v = json_of(&sosdeg(&["pointed", "--curve", "empty-conic", "--j", "1"]));
    assert_eq!(v["pointed"], false);
    assert_eq!(v["residual"], 0.0);
    let v = json_of(&sosdeg(&["pointed", "--curve", "deltoid", "--j", "1"]));
    assert_eq!(v["pointed"], true);
    assert!(v["min_eigenvalue"].as_f64().unwrap() >= 1e-6);
}

#[test]
fn bad_input_exits_64() {
    for args in [
        &["certify", "--curve", "nope", "--f", "motzkin", "--k", "0"][..],
        &["certify", "--curve", "p2", "--f", "nope", "--k", "0"][..],
        &["certify", "--curve", "p2", "--f", "motzkin", "--j", "2", "--k", "0"][..],
        &["certify", "--curve", "p2", "--f", "motzkin", "--k", "0", "--eps-feas=0"][..],
        &["certify", "--curve", "p2", "--f", "motzkin", "--k", "0", "--kmax", "2"][..],
        &["bound"][..],
        &["polygon", "--name", "[[0,0],[1,0],[2,0]]"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(code(&sosdeg(args)), 64, "{args:?}");
    }
}

#[test]
fn compute_failure_exits_70_with_diagnostic() {
    // the plane is not a curve, so it has no curve invariants
    let o = sosdeg(&["bound", "--curve", "p2"]);
    assert_eq!(code(&o), 70);
    let v = json_of(&o);
    assert_eq!(v["error"], "compute");
    assert!(v["message"].is_string());
}

#[test]
fn version_lists_solver_defaults() {
    let o = sosdeg(&["--version"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for key in ["eps_feas = 1e-8", "max_iter = 200", "delta = 1e-6"] {
        assert!(s.contains(key), "{s}");
    }
}
