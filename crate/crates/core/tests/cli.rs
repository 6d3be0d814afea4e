use std::path::PathBuf;
use std::process::{Command, Output};

use rbb::semantics::{model_from_json, validate_model};
use rbb::theory::{TheoryConfig, TheoryKind};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn rbb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbb")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_proof_accepts_fixture() {
    let o = rbb(&["check-proof", fixture("rc.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Accepted (theory RBB, 7 steps)\n");
}

#[test]
fn check_proof_rejects_tampered_fixture() {
    let text = std::fs::read_to_string(fixture("ic.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut doc = doc;
    let steps = doc["steps"].as_array_mut().unwrap();
    let last = steps.len() - 1;
    steps.swap(0, last);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = rbb(&["check-proof", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("Rejected at step"));
}

#[test]
fn malformed_inputs_exit_2() {
    assert_eq!(rbb(&["parse", "r:", "--reasons", "r"]).status.code(), Some(2));
    assert_eq!(rbb(&["check-proof", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(rbb(&["scenario", "NoSuchScenario"]).status.code(), Some(2));
    assert_eq!(rbb(&["find-model", "p", "--bounds", "worlds=zero"]).status.code(), Some(2));
    assert_eq!(rbb(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn parse_prints_normal_form() {
    let o = rbb(&["parse", "r:p->q", "--reasons", "r"]);
    assert_eq!(stdout(&o), "r:p -> q\n");
    let o = rbb(&["parse", "r:(p -> q) -> r:p -> r:q", "--reasons", "r", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["axiom"], "RK");
}

#[test]
fn find_model_witness_round_trips() {
    let o = rbb(&["find-model", "~B r", "r:p", "r:~p", "--reasons", "r", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "witness");
    let m = model_from_json(&v["model"].to_string()).unwrap();
    let cfg = TheoryConfig::new(TheoryKind::Rbb, ["r"], ["p"]).unwrap();
    assert!(validate_model(&m, &cfg).unwrap().is_empty());
    assert_eq!(m.len(), 1);
}

#[test]
fn search_exit_codes() {
    let o = rbb(&["find-model", "B p", "B ~p", "--bounds", "worlds=2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = rbb(&["nonvalid", "B p -> ~B ~p"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_rbb"))
        .args([
            "find-model",
            "r:s:t:p",
            "B (r:q)",
            "~B (r:q | r:q)",
            "--reasons",
            "r,s,t",
            "--bounds",
            "worlds=6,nbhd=8",
        ])
        .env("RBB_BUDGET_SECS", "0.2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).starts_with("budget exceeded"));
}

#[test]
fn eval_and_validate_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"worlds": ["w", "v"],
            "access": {"r": [["w", "w"], ["v", "v"]]},
            "neighborhoods": {"w": [["w"], ["w", "v"]], "v": [["v"], ["w", "v"]]},
            "valuation": {"w": ["p"]},
            "point": "w"}"#,
    )
    .unwrap();
    let m = path.to_str().unwrap();
    assert_eq!(stdout(&rbb(&["eval", "--model", m, "B p"])), "true\n");
    assert_eq!(stdout(&rbb(&["eval", "--model", m, "--at", "v", "B p"])), "false\n");
    assert_eq!(rbb(&["validate-model", m]).status.code(), Some(0));
    std::fs::write(&path, r#"{"worlds": ["w"], "neighborhoods": {"w": [[], ["w"]]}}"#).unwrap();
    let o = rbb(&["validate-model", m, "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);
}

#[test]
fn scenario_report_is_json_and_stable() {
    let a = rbb(&["scenario", "TDTD+NoR", "--bounds", "worlds=4"]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["consistency"]["verdict"], "witness");
    let status = |label: &str| {
        v["queries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|q| q["label"] == label)
            .unwrap()["status"]
            .clone()
    };
    assert_eq!(status("jtb_e(p | q)"), "holds-in-all-found-witnesses");
    assert_eq!(status("jtb_nil(p | q)"), "fails-in-some-witness");
    let b = rbb(&["scenario", "TDTD+NoR", "--bounds", "worlds=4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scenario_file_round_trip() {
    let sc = rbb::jtb::scenario("Barn").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("barn.json");
    std::fs::write(&path, rbb::jtb::scenario_to_json(&sc)).unwrap();
    let o = rbb(&["scenario", path.to_str().unwrap(), "--format", "text", "--bounds", "worlds=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("scenario Barn (QRBB)"));
}

#[test]
fn library_table() {
    let o = rbb(&["library", "--sample", "5", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("Accepted").count(), 14);
    assert!(text.contains("0 failures"));
    let j = rbb(&["library", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["proofs"].as_array().unwrap().len(), 14);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = rbb::cli::run(["rbb", "library"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, rbb(&["library"]).stdout);
}
