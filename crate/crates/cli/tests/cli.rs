use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nkg_core::fixtures::paper_fixture;
use nkg_core::{evaluate_all, integrate};
use serde_json::Value;
use tempfile::TempDir;

fn nkg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkg"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn built(dir: &TempDir, corpus: &str) -> PathBuf {
    let out = dir.path().join(format!("{corpus}.graph.json"));
    let res = nkg(&["build", s(&fixture(corpus)), s(&out)]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    out
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_clean_fixture() {
    let out = nkg(&["validate", s(&fixture("family_story.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
}

#[test]
fn validate_reports_dangling_segment() {
    let dir = TempDir::new().unwrap();
    let mut c = paper_fixture();
    c.panels[4].segment_id = "s9".into();
    let path = write(&dir, "bad.json", &c.to_json());
    let out = nkg(&["validate", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.contains("s9"));

    // build still refuses it before graph construction
    let res = nkg(&["build", s(&path), s(&dir.path().join("g.json"))]);
    assert_ne!(res.status.code(), Some(0));
}

#[test]
fn validate_reports_agent_not_in_characters() {
    let dir = TempDir::new().unwrap();
    let mut c = paper_fixture();
    c.panels[0].actions[0].agent = "Z".into();
    let path = write(&dir, "bad.json", &c.to_json());
    let out = nkg(&["validate", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["severity"], "error");
    let msg = lines[0]["message"].as_str().unwrap();
    assert!(msg.contains('Z') && msg.contains("0_0_0"), "{msg}");
}

#[test]
fn validate_rejects_non_json() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "x.json", "not json");
    assert_eq!(nkg(&["validate", s(&path)]).status.code(), Some(2));
}

#[test]
fn build_fixture_has_nine_panels() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "family_story.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(graph).unwrap()).unwrap();
    assert_eq!(v["tier"], "unified");
    let panels = v["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|n| n["kind"] == "panel")
        .count();
    assert_eq!(panels, 9);
}

#[test]
fn build_empty_corpus() {
    let dir = TempDir::new().unwrap();
    let corpus = write(
        &dir,
        "empty.json",
        r#"{"story_id": "s", "macro_events": [], "events": [], "segments": [], "panels": []}"#,
    );
    let out = dir.path().join("g.json");
    assert!(nkg(&["build", s(&corpus), s(&out)]).status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 0);
}

#[test]
fn build_refuses_invalid_corpus() {
    let dir = TempDir::new().unwrap();
    let mut c = paper_fixture();
    c.panels[1].reading_order = 0;
    let corpus = write(&dir, "bad.json", &c.to_json());
    let out = dir.path().join("g.json");
    let res = nkg(&["build", s(&corpus), s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn query_answers() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "family_story.json");
    let out = nkg(&["query", s(&graph), "actions", "Think of family"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["task"], "actions");
    assert_eq!(v["source_unit"], "Think of family");
    assert_eq!(v["items"][0], "hold_hand");

    let out = nkg(&["query", s(&graph), "characters"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["map"]["A"][0], "0_0_0");
}

#[test]
fn query_unknown_unit_exits_one() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "family_story.json");
    let out = nkg(&["query", s(&graph), "timeline", "No such thing"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("No such thing"));
}

#[test]
fn query_without_unit_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "family_story.json");
    assert_eq!(
        nkg(&["query", s(&graph), "dialogue"]).status.code(),
        Some(2)
    );
}

#[test]
fn eval_matches_library() {
    let out = nkg(&["eval", s(&fixture("family_story.json")), "--per-unit"]);
    assert!(out.status.success());
    let c = paper_fixture();
    let lib = evaluate_all(&integrate(&c).unwrap(), &c).unwrap();
    assert_eq!(stdout(&out), lib.to_json());
}

#[test]
fn eval_table_four_rows() {
    let out = nkg(&["eval", s(&fixture("family_story.json")), "--table"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with("1.00")));
}

#[test]
fn eval_perturbed_graph_and_synonyms() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "chores_story.json");
    let text = std::fs::read_to_string(&graph).unwrap();
    let perturbed = write(
        &dir,
        "p.json",
        &text.replace("\"verb\": \"insert\"", "\"verb\": \"insert_into\""),
    );
    let corpus = fixture("chores_story.json");
    let out = nkg(&["eval", s(&corpus), "--graph", s(&perturbed), "--table"]);
    assert!(stdout(&out).lines().nth(2).unwrap().ends_with("0.96"));

    let syn = write(&dir, "syn.json", r#"{"insert_into": "insert"}"#);
    let out = nkg(&[
        "eval",
        s(&corpus),
        "--graph",
        s(&perturbed),
        "--synonyms",
        s(&syn),
        "--table",
    ]);
    assert!(stdout(&out).lines().nth(2).unwrap().ends_with("1.00"));
}

#[test]
fn export_formats() {
    let dir = TempDir::new().unwrap();
    let graph = built(&dir, "family_story.json");
    let dot = stdout(&nkg(&[
        "export",
        s(&graph),
        "--format",
        "dot",
        "--kinds",
        "event,macro_event",
    ]));
    graphviz_rust::parse(&dot).unwrap();
    assert!(dot.contains("\"event:intro_1\""));
    assert!(!dot.contains("\"panel:0_0_0\" ["));

    let json = stdout(&nkg(&["export", s(&graph), "--format", "json"]));
    assert_eq!(json, std::fs::read_to_string(&graph).unwrap());

    let bad = nkg(&["export", s(&graph), "--kinds", "nonsense"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gen_fixture_paper_matches_checked_in_file() {
    let out = nkg(&["gen-fixture", "--paper"]);
    assert_eq!(
        stdout(&out),
        std::fs::read_to_string(fixture("family_story.json")).unwrap()
    );
}

#[test]
fn gen_fixture_seed_is_deterministic() {
    let a = stdout(&nkg(&["gen-fixture", "--seed", "42"]));
    let b = stdout(&nkg(&["gen-fixture", "--seed", "42"]));
    assert_eq!(a, b);
    assert_ne!(a, stdout(&nkg(&["gen-fixture", "--seed", "43"])));
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "gen.json", &a);
    assert_eq!(nkg(&["validate", s(&path)]).status.code(), Some(0));
}

#[test]
fn gen_fixture_usage_errors() {
    assert_eq!(nkg(&["gen-fixture", "--seed"]).status.code(), Some(2));
    assert_eq!(nkg(&["gen-fixture"]).status.code(), Some(2));
}
