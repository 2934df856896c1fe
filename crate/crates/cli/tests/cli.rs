use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn exsh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exsh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = exsh(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn as_f64(v: &Value) -> f64 {
    let s = v.as_str().unwrap();
    match s.split_once('/') {
        Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn golden_word_is_admissible() {
    let v = ok_json(&["beta", "admissible", "--beta", "golden", "--word", "1,0,1,0"]);
    assert_eq!(v["command"], "beta admissible");
    assert_eq!(v["result"]["admissible"], true);
}

#[test]
fn golden_conformal_lambda() {
    let v = ok_json(&[
        "conformal",
        "solve",
        "--beta",
        "golden",
        "--J",
        "0,1",
        "--H",
        "1,1",
        "--tol",
        "1e-9",
    ]);
    let hi = as_f64(&v["result"]["lambda_hi"]);
    let lo = as_f64(&v["result"]["lambda_lo"]);
    assert!((hi - 0.6180339887).abs() < 1e-9);
    assert!(lo <= hi);
    assert_eq!(v["result"]["blocks"]["1"], "1");
    assert_eq!(v["result"]["blocks"]["2"], "0");
}

#[test]
fn pes_rows() {
    let pes = fixture("pes.json");
    let v = ok_json(&["markov", "build", "--tms", &pes, "--pi", "1,1,1"]);
    assert_eq!(v["result"]["P"][0], serde_json::json!(["1/2", "1/2", "0"]));
    assert_eq!(v["result"]["h"], serde_json::json!(["1/2", "1", "1/2"]));
}

#[test]
fn measure_file_matches_flags() {
    let a = ok_json(&["markov", "build", "--measure", &fixture("pes_measure.json")]);
    let b = ok_json(&["markov", "build", "--tms", &fixture("pes.json"), "--pi", "1,1,1"]);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn explicit_matrix_is_checked() {
    let pes = fixture("pes.json");
    let v = ok_json(&[
        "markov",
        "verify-exchange",
        "--tms",
        &pes,
        "--pi",
        "1,1,1",
        "--n-max",
        "6",
    ]);
    assert_eq!(v["result"]["violations"], serde_json::json!([]));

    let out = exsh(&[
        "markov",
        "build",
        "--tms",
        &pes,
        "--pi",
        "1,1,1",
        "--p",
        "1/2,1/2,0;0,0,1;1/3,1/3,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(err["error"]["kind"].is_string());
}

#[test]
fn tms_structure() {
    let v = ok_json(&["tms", "check", "--tms", &fixture("pes.json")]);
    assert_eq!(v["result"]["mixing"], true);
    assert_eq!(v["result"]["almost_onto"], false);
    let v = ok_json(&["tms", "lattice", "--tms", &fixture("pes.json")]);
    assert_eq!(v["result"]["aperiodic"]["ProperAt"], 6);
}

#[test]
fn domain_error_exits_one() {
    let out = exsh(&["beta", "omega", "--beta", "rat:4/2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "IntegerBeta");

    let out = exsh(&[
        "conformal",
        "solve",
        "--beta",
        "quad:1,-3,1",
        "--J",
        "1,2",
        "--H",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "SingletonSystem");
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(exsh(&["beta", "frobnicate"]).status.code(), Some(2));
    assert_eq!(exsh(&["beta", "admissible", "--beta", "golden"]).status.code(), Some(2));
    assert_eq!(
        exsh(&["--out", "xml", "beta", "omega", "--beta", "golden"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(exsh(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_across_threads() {
    let pes = fixture("pes.json");
    let args = [
        "markov",
        "verify-exchange",
        "--tms",
        &pes,
        "--pi",
        "1,2,3",
        "--n-max",
        "7",
    ];
    let a = exsh(&args).stdout;
    let mut threaded = vec!["--threads", "4"];
    threaded.extend_from_slice(&args);
    let b = exsh(&threaded).stdout;
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

#[test]
fn csv_output() {
    let out = exsh(&["--out", "csv", "beta", "full-words", "--beta", "golden", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "word\n\"1,0,0\"\n");

    let out = exsh(&[
        "--out",
        "csv",
        "markov",
        "build",
        "--tms",
        &fixture("pes.json"),
        "--pi",
        "1,1,1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("state,p0,p1,p2"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn ephemeral_round_trip() {
    let v = ok_json(&["ephemeral", "decode", "--code", "2,1,1"]);
    let walk: Vec<String> = v["result"]["walk"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string())
        .collect();
    let v = ok_json(&["ephemeral", "encode", "--word", &walk.join(",")]);
    assert_eq!(v["result"]["code"], serde_json::json!([2, 1, 1]));
    assert_eq!(v["result"]["rest"], serde_json::json!([]));
}

#[test]
fn relations() {
    let v = ok_json(&["relation", "tail", "--x", "0,1:2", "--y", "1,0:2"]);
    assert_eq!(v["result"]["related"], true);
    let v = ok_json(&["relation", "grand", "--x", ":1,0", "--y", ":0,1"]);
    assert_eq!(v["result"]["related"], true);
    let v = ok_json(&["relation", "tail", "--x", ":1,0", "--y", ":0,1"]);
    assert_eq!(v["result"]["related"], false);
}
