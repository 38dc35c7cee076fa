use std::process::Command;

use holder_cli::run;
use holder_core::complex::HolderComplex;
use serde_json::{json, Value};

fn holder(args: &[&str]) -> (Value, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_holder")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (json, stderr, out.status.code().unwrap())
}

#[test]
fn binary_streams_and_exit_codes() {
    let (json, stderr, code) = holder(&["directions", "--weights", "3,2,1"]);
    assert_eq!(json, json!({ "directions": ["3/2", "2/1", "3/1"] }));
    assert!(stderr.contains("3 direction(s)"));
    assert_eq!(code, 0);

    let (json, stderr, code) = holder(&["contact-leaves", "--weights", "2,1", "--x", "1,1", "--y", "4,2"]);
    assert_eq!(code, 1);
    assert_eq!(json["error"]["kind"], "foliation");
    assert!(stderr.starts_with("error:"));

    let (json, _, code) = holder(&["horn", "--poly", "x1^2 + x2^2 - x3^4"]);
    assert_eq!(code, 2);
    assert_eq!(json["error"]["kind"], "usage");

    let (json, _, code) = holder(&["nonsense"]);
    assert_eq!(code, 2);
    assert!(json["error"]["message"].is_string());
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "simplex", "--trials", "300", "--seed", "42"];
    let a = Command::new(env!("CARGO_BIN_EXE_holder")).args(args).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_holder")).args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let horn = ["holder", "horn", "--poly", "x1^2 + x2^4 - x3^8", "--weights", "4,2,1"];
    assert_eq!(run(horn).stdout(), run(horn).stdout());
}

#[test]
fn verify_reports_suite_fields_in_order() {
    let r = run(["holder", "verify", "--suite", "ultrametric", "--trials", "500", "--seed", "7"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(
        r.stdout(),
        "{\"suite\":\"ultrametric\",\"trials\":500,\"failures\":0,\"seed\":7}\n"
    );
    let r = run(["holder", "verify", "--suite", "canonical", "--seed", "3"]);
    assert_eq!(r.json["trials"], 200);
    assert_eq!(r.json["failures"], 0);
}

#[test]
fn horn_golden_examples() {
    let r = run(["holder", "horn", "--poly", "x1^2+x2^2-x3^4", "--weights", "2,2,1"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.json["beta"], json!(["2/1", "2/1"]));
    assert_eq!(r.json["permutation"], json!([0, 1, 2]));
    assert!(r.summary.contains("2/1"));

    // A connected link reports a single exponent.
    let r = run(["holder", "horn", "--poly", "x1^2 + x2^2 - x3^3", "--weights", "3,3,2"]);
    assert_eq!(r.json["link_component_count"], 1);
    assert_eq!(r.json["beta"], "3/2");
}

#[test]
fn horn_permutes_unsorted_weights() {
    // Same germ as x1^2 + x2^4 - x3^8 with w = (4, 2, 1), coordinates relabelled.
    let r = run(["holder", "horn", "--poly", "x2^4 - x1^8 + x3^2", "--weights", "1,2,4"]);
    assert_eq!(r.exit_code, 0, "{}", r.json);
    assert_eq!(r.json["permutation"], json!([2, 1, 0]));
    assert_eq!(r.json["beta"], json!(["2/1", "2/1"]));
}

#[test]
fn nontrivial_origin_slice() {
    // x3 = 0 meets {x1^2 - x2^2 = x3^2} along two lines.
    let r = run(["holder", "horn", "--poly", "x1^2 - x2^2 - x3^2", "--weights", "1,1,1"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.json["origin_slice_trivial"], false);
    assert_eq!(r.json["link_component_count"], Value::Null);
    assert_eq!(r.json["beta"], "1/1");
}

#[test]
fn complex_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let path_str = path.to_str().unwrap();
    let r = run([
        "holder", "complex", "--poly", "x1^2+x2^2-x3^4", "--weights", "2,2,1", "--out", "json", "--output", path_str,
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.json);
    assert_eq!(r.json["vertices"], 4);
    let text = std::fs::read_to_string(&path).unwrap();
    let complex = HolderComplex::from_json(&text).unwrap();
    assert_eq!(complex.to_json(), text);
    assert!(complex.is_canonical());
    assert!(complex.betas().iter().all(|b| b.to_string() == "2/1"));

    let inline = run(["holder", "complex", "--poly", "x1^2+x2^2-x3^4", "--weights", "2,2,1"]);
    assert_eq!(inline.json, serde_json::from_str::<Value>(&text).unwrap());

    let dot = run(["holder", "complex", "--poly", "x1^2+x2^2-x3^4", "--weights", "2,2,1", "--out", "dot"]);
    let out = dot.stdout();
    assert!(out.starts_with("graph"));
    assert_eq!(out.matches("label=\"2/1\"").count(), 4);
}

#[test]
fn complex_rejects_nontrivial_origin_slice() {
    let r = run(["holder", "complex", "--poly", "x1^2 - x2^2 - x3^2", "--weights", "1,1,1"]);
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.json["error"]["kind"], "surface");
}

#[test]
fn contact_arcs_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let r = run([
        "holder",
        "contact-arcs",
        "--arc1",
        "t; t^3/2",
        "--arc2",
        "t; t^3/2 + t^5/2",
        "--numeric",
        "--norm",
        "l1",
        "--count",
        "8",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.json);
    assert_eq!(r.json["contact_order"], "5/2");
    assert_eq!(r.json["numeric"]["norm"], "l1");
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,d"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 8);
    assert!((rows[0][0] - 0.01).abs() < 1e-15);
    assert!(rows.windows(2).all(|w| w[1][0] < w[0][0] && w[1][1] < w[0][1]));
}

#[test]
fn contact_arcs_errors() {
    let r = run(["holder", "contact-arcs", "--arc1", "t", "--arc2", "t; t"]);
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.json["error"]["kind"], "arc");
    let r = run(["holder", "contact-arcs", "--arc1", "t^0", "--arc2", "t"]);
    assert_eq!(r.exit_code, 2);
    assert_eq!(r.json["error"]["kind"], "parse");
    let r = run(["holder", "contact-arcs", "--arc1", "t", "--arc2", "2*t", "--numeric", "--norm", "l3"]);
    assert_eq!(r.exit_code, 2);
    let r = run(["holder", "contact-arcs", "--arc1", "t", "--arc2", "2*t", "--csv", "x.csv"]);
    assert_eq!(r.exit_code, 2, "--csv requires --numeric");
}

#[test]
fn check_homogeneous() {
    let r = run(["holder", "check-homogeneous", "--poly", "x1^2 + x2^4 - x3^8", "--weights", "4,2,1"]);
    assert_eq!(r.json, json!({ "homogeneous": true, "degree": 8, "weights": [4, 2, 1], "permutation": [0, 1, 2] }));
    let r = run(["holder", "check-homogeneous", "--poly", "x1^2 + x2^2", "--weights", "1,1"]);
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.json["error"]["kind"], "polynomial");
    let r = run(["holder", "check-homogeneous", "--poly", "x1^2 + w", "--weights", "1,1,1"]);
    assert_eq!(r.exit_code, 2);
    assert!(r.json["error"]["message"].as_str().unwrap().contains("unknown variable"));
}
