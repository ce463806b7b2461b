use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn origami(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_origami"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = origami(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    fs::read_to_string(path).unwrap()
}

#[test]
fn veech_l23() {
    let v = json(&["veech", "--name", "L23", "--json"]);
    assert_eq!(v["index"], 9);
    assert_eq!(v["cusps"].as_array().unwrap().len(), 3);
    assert_eq!(v["general_level"], 12);
    assert_eq!(v["curve"]["genus"], 0);
    for key in ["degree", "generators", "coset_reps", "curve", "max_orbit"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn golden_outputs() {
    for (file, args) in [
        ("veech_l23.json", &["veech", "--name", "L23", "--json"][..]),
        (
            "info_d.json",
            &["info", "5; (1 2 3); (1 4 5)(2 3)", "--json"][..],
        ),
        (
            "congruence_d.json",
            &["congruence", "--name", "D", "--json"][..],
        ),
        (
            "sequence_build_l23.json",
            &["sequence", "build", "--base", "L23", "--n", "3", "--json"][..],
        ),
    ] {
        assert_eq!(stdout(args), golden(file), "{file}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["veech", "--name", "D", "--json"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn congruence_witness_for_d() {
    let v = json(&["congruence", "--name", "D", "--witness", "--json"]);
    assert_eq!(v["verdict"]["kind"], "NonCongruence");
    assert_eq!(v["general_level"], 60);
    let w = &v["witness"];
    assert_eq!(w["modulus"], 60);
    assert_eq!(w["h"], serde_json::json!([[1, 1], [0, 1]]));
    assert_eq!(w["factors"].as_array().unwrap().len(), 2);
}

#[test]
fn congruence_trivial() {
    let text = stdout(&["congruence", "1; (); ()"]);
    assert!(text.contains("congruence, level 1"), "{text}");
}

#[test]
fn info_l23() {
    let v = json(&["info", "4; (2 3 4); (1 2)", "--json"]);
    assert_eq!(v["genus"], 2);
    assert_eq!(v["vertices"], 2);
    assert_eq!(v["degree"], 4);
}

#[test]
fn accepted_inputs() {
    assert_eq!(json(&["info", "1; (); ()", "--json"])["genus"], 1);
    let v = json(&["info", "4; (1 2)(3 4); (1 3)(2 4)", "--json"]);
    assert_eq!(v["degree"], 4);
    let v = json(&["info", "4; [2,3,4,1]; [1,2,3,4]", "--json"]);
    assert_eq!(v["genus"], 1);
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        &["info", "4; (1 2 3; (1)"][..],
        &["info", "4; (1 2); (3 4)"][..],
        &["info", "--name", "nonsense"][..],
        &["frobnicate"][..],
        &["sequence", "build", "--base", "X"][..],
    ] {
        let out = origami(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = origami(&["info", "4; (1 2); (3 4)"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("transitive"));
}

#[test]
fn caps_exit_1() {
    let out = origami(&["veech", "--name", "D", "--max-orbit", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = origami(&["congruence", "--name", "D", "--max-closure", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cosets.dot");
    stdout(&["veech", "--name", "L23", "--dot", path.to_str().unwrap()]);
    let dot = fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches(" -> ").count(), 18);

    let path = dir.path().join("automaton.dot");
    let text = stdout(&["subgroup", "--name", "D", "--dot", path.to_str().unwrap()]);
    assert!(text.contains("rank:  6"));
    assert!(fs::read_to_string(&path).unwrap().contains("doublecircle"));
}

#[test]
fn subgroup_basis() {
    let v = json(&["subgroup", "--name", "L23", "--json"]);
    assert_eq!(v["index"], 4);
    assert_eq!(v["rank"], 5);
    assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
}

#[test]
fn sequence_verify_parallel() {
    let serial = stdout(&["sequence", "verify", "--base", "L23", "--n", "3", "--json"]);
    let parallel = stdout(&[
        "sequence", "verify", "--base", "L23", "--n", "3", "--jobs", "3", "--json",
    ]);
    assert_eq!(serial, parallel);
    let v: Value = serde_json::from_str(&serial).unwrap();
    for (k, row) in v["members"].as_array().unwrap().iter().enumerate() {
        assert_eq!(row["n"], k + 1);
        assert_eq!(row["genus"], k + 2);
        assert_eq!(row["parabolic_width"], 3 * (k + 1));
        assert_eq!(row["contained_in_first"], true);
        assert_eq!(row["matches_power_kernel"], true);
    }
}

#[test]
fn sequence_verify_d_congruence() {
    let v = json(&[
        "sequence",
        "verify",
        "--base",
        "D",
        "--n",
        "2",
        "--congruence",
        "--json",
    ]);
    for row in v["members"].as_array().unwrap() {
        assert_eq!(row["congruence"], false);
    }
}

#[test]
fn replay_proof() {
    let text = stdout(&["replay-proof"]);
    assert!(text.contains("order of p60(A1): [4, 1, 5]"));
    assert!(text.contains("order of p60(A6^2): [1, 3, 5]"));
    let v = json(&["replay-proof", "--json"]);
    assert_eq!(v["witness"]["h"], serde_json::json!([[1, 1], [0, 1]]));
}
