//! End-to-end runs of the binary: exit-code contract, determinism, and the
//! committed fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ultramet"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", fixture("ultra3.json").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("valid ultrametric"));

    let bad = run(&["validate", fixture("not_ultra.json").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("U4"), "report: {text}");
    assert!(text.contains("p0") && text.contains("p2") && text.contains("p1"));

    let parse = run(&["validate", fixture("bad_rational.json").to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(2));

    let missing = run(&["validate", "no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn retract_fixture_and_tau_precondition() {
    let out = run(&[
        "retract",
        fixture("ultra3.json").to_str().unwrap(),
        "--tau",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(j["mapping"]["x"], "a");
    assert_eq!(j["mapping"]["a"], "a");
    assert_eq!(j["mapping"]["b"], "b");
    assert_eq!(j["tau_squared"], "4");
    assert_eq!(j["certificate"], "passed");
    // three points fit inside the default brute-force bound
    assert_eq!(j["nonexpansive_mapping"]["x"], "a");

    let bad = run(&[
        "retract",
        fixture("ultra3.json").to_str().unwrap(),
        "--tau",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn extend_chain_flag_overrides_request() {
    let base = run(&["extend", fixture("extend_3pt.json").to_str().unwrap()]);
    let auto = run(&[
        "extend",
        fixture("extend_3pt.json").to_str().unwrap(),
        "--chain",
        "auto",
    ]);
    assert_eq!(auto.status.code(), Some(0), "stderr: {:?}", auto.stderr);
    let j: serde_json::Value = serde_json::from_str(&stdout(&auto)).expect("json");
    // the synthesized chain lists the occurring positive values plus half
    // the least one
    assert_eq!(j["chain"], serde_json::json!(["4", "2", "1/2", "1/4"]));
    // the explicit-chain run used the request's chain instead
    let jb: serde_json::Value = serde_json::from_str(&stdout(&base)).expect("json");
    assert_eq!(jb["chain"], serde_json::json!(["8", "4", "1/2"]));
}

#[test]
fn extend_fixture_values() {
    let out = run(&["extend", fixture("extend_3pt.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let j: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(j["rounded"]["table"][0][1], "1/2");
    assert_eq!(j["retraction"]["mapping"]["x"], "a");
    // output rows over points [a, b, x]
    assert_eq!(j["output"]["table"][0][1], "2");
    assert_eq!(j["output"]["table"][0][2], "1/2");
    assert_eq!(j["output"]["table"][1][2], "2");
    assert_eq!(j["certificates"]["restriction"], true);
    assert_eq!(j["certificates"]["flavor"], true);

    // the emitted output table re-parses as a valid space file
    let parsed = ultramet_core::json::table_from_json(&j["output"]).expect("re-parse");
    assert_eq!(parsed.flavor(), ultramet_core::space::Flavor::Ultrametric);

    // identical request, identical bytes
    let again = run(&["extend", fixture("extend_3pt.json").to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn ud_on_fixtures() {
    let same = run(&[
        "ud",
        fixture("ultra3.json").to_str().unwrap(),
        fixture("ultra3.json").to_str().unwrap(),
    ]);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(stdout(&same).trim(), "0");

    let diff = run(&[
        "ud",
        fixture("ultra3.json").to_str().unwrap(),
        fixture("ultra3_const.json").to_str().unwrap(),
    ]);
    assert_eq!(diff.status.code(), Some(0));
    assert_eq!(stdout(&diff).trim(), "4");
}

#[test]
fn gen_is_deterministic_and_valid() {
    let args = ["gen", "--points", "5", "--depth", "3", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    let dir = std::env::temp_dir().join("ultramet-gen-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gen7.json");
    let to_file = run(&[
        "gen",
        "--points",
        "5",
        "--depth",
        "3",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let validated = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(validated.status.code(), Some(0));

    // round-trip: the emitted file re-parses to the same canonical bytes
    let body = std::fs::read(&path).unwrap();
    assert_eq!(body, first.stdout);
}

#[test]
fn crosscheck_reports_agreement() {
    let out = run(&["crosscheck", "--seed", "1", "--count", "200"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    assert_eq!(stdout(&out).trim(), "200/200 equal");
}
