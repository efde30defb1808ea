use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn locdom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locdom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn grid(dir: &Path) -> PathBuf {
    let p = dir.join("grid.el");
    let out = locdom(&["generate", "grid", "--rows", "4", "--cols", "4", "-o", p.to_str().unwrap()]);
    assert!(out.status.success());
    p
}

#[test]
fn generate_writes_header() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(grid(dir.path())).unwrap();
    assert!(text.starts_with("p 16 24 genus=0"), "{text}");
}

#[test]
fn solve_grid_dominates() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid(dir.path());
    let v = stdout_json(&locdom(&["solve", g.to_str().unwrap()]));
    assert_eq!(v["is_dominating"], Value::Bool(true));
    assert_eq!(v["rounds"], 5);
    let size = v["size"].as_u64().unwrap();
    assert_eq!(v["dominating_set"].as_array().unwrap().len() as u64, size);
}

#[test]
fn oracle_grid_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid(dir.path());
    let v = stdout_json(&locdom(&["oracle", g.to_str().unwrap()]));
    assert_eq!(v["gamma"], 4);
}

#[test]
fn check_minor_on_k33() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k33.el");
    assert!(locdom(&["generate", "subdivided-k33", "-o", p.to_str().unwrap()]).status.success());
    let v = stdout_json(&locdom(&["check-minor", p.to_str().unwrap()]));
    assert_eq!(v["present"], Value::Bool(true));
    let g = grid(dir.path());
    let v = stdout_json(&locdom(&["check-minor", g.to_str().unwrap()]));
    assert_eq!(v["present"], Value::Bool(false));
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid(dir.path());
    let out = locdom(&["solve", g.to_str().unwrap()]);
    let mut v = stdout_json(&out);
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string(&v).unwrap()).unwrap();
    let ok = locdom(&["verify", good.to_str().unwrap(), g.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    v["d_phase1"] = Value::Array(vec![]);
    v["d_phase2"] = Value::Array(vec![]);
    v["dominating_set"] = Value::Array(vec![]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let out = locdom(&["verify", bad.to_str().unwrap(), g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_graph_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.el");
    std::fs::write(&p, "this is not an edge list\n").unwrap();
    assert_eq!(locdom(&["solve", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn experiment_writes_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"corpus":[{"family":"grid","rows":3,"cols":4,"seed":0,"count":2},{"family":"cycle","n":9}]}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let jsonl = dir.path().join("out.jsonl");
    let out = locdom(&[
        "experiment",
        manifest.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--jsonl",
        jsonl.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert!(lines.next().unwrap().starts_with("family,"));
    assert_eq!(lines.count(), 3);

    let re = locdom(&["verify", "--records", jsonl.to_str().unwrap()]);
    assert!(re.status.success(), "{}", String::from_utf8_lossy(&re.stderr));
}
