use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orbibraid"));
    c.env_remove("ORBIBRAID_MAX_NODES").env_remove("ORBIBRAID_SLACK").env_remove("ORBIBRAID_MAX_COSETS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn emit(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut all = vec!["emit"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &p]);
    let o = run(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn emit_writes_the_text_format() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "orbifold", "--n", "3", "--cones", "3"]);
    let text = std::fs::read_to_string(p).unwrap();
    assert!(text.lines().any(|l| l.starts_with("params: ") && l.contains("n=3")));
    assert!(text.lines().any(|l| l == "gens: h1 h2 u"));
    assert!(text.lines().filter(|l| l.starts_with("rel: ")).count() >= 4);
}

#[test]
fn prove_writes_a_chain_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "orbifold", "--n", "2", "--cones", "2"]);
    let chain = dir.path().join("chain.jsonl");
    let json = dir.path().join("proof.json");
    let o = run(&[
        "prove",
        "--pres",
        &p,
        "--lhs",
        "u*h1*u^-1*h1",
        "--rhs",
        "h1*u*h1*u^-1",
        "--emit-chain",
        chain.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("proved"));
    let lines: Vec<Value> =
        std::fs::read_to_string(&chain).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!lines.is_empty());
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["step"], i);
        for key in ["position", "tag", "direction"] {
            assert!(l.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(read_json(&json)["status"], "proved");
}

#[test]
fn prove_reports_unknown_with_exit_two() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "orbifold", "--n", "3", "--cones", "2"]);
    let o = run(&["prove", "--pres", &p, "--lhs", "h1", "--rhs", "h2", "--max-nodes", "500"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_env_var_is_read() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "orbifold", "--n", "3", "--cones", "2"]);
    let o = bin()
        .env("ORBIBRAID_MAX_NODES", "0")
        .args(["prove", "--pres", &p, "--lhs", "h1", "--rhs", "h1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn order_and_overflow() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "w.txt", &["--builder", "orbifold", "--n", "2", "--cones", "2", "--coxeterize"]);
    let o = run(&["order", "--pres", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "8");
    let free = emit(dir.path(), "f.txt", &["--builder", "orbifold", "--n", "3", "--cones", "2"]);
    let o = run(&["order", "--pres", &free, "--max-cosets", "200"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "overflow");
}

#[test]
fn quotient_commands() {
    let o = run(&["quotient", "enum", "--m", "3", "--p", "3", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("54"));
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "two-cone", "--n", "3", "--m", "3", "--m2", "2"]);
    let o = run(&["quotient", "check", "--pres", &p]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["quotient", "eval", "--pres", &p, "--word", "h1*h2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn normal_form_moves_loops_right() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "one-cone", "--n", "3", "--m", "2"]);
    let o = run(&["normal-form", "--pres", &p, "--word", "u*h1*u*h2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "hu1*h2 | u=0");
}

#[test]
fn verify_hom_identity_map() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "b.txt", &["--builder", "orbifold", "--n", "3", "--cones", "3"]);
    let map = dir.path().join("map.txt");
    std::fs::write(&map, "h1 -> h1\nh2 -> h2\nu -> u\n").unwrap();
    let o = run(&["verify-hom", "--source", &p, "--target", &p, "--map", map.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn center_reports_membership() {
    let o = run(&["center", "--n", "3", "--m", "2", "--power", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("theta^2 lies in the normal subgroup"));
    assert!(stdout(&o).contains("l = 2"));
    let o = run(&["center", "--n", "3", "--m", "2", "--power", "1"]);
    assert!(stdout(&o).contains("does not lie"));
}

#[test]
fn suite_json_has_the_report_schema() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("r.json");
    let o = run(&["suite", "lemma31", "--n", "3", "--m", "2", "--m2", "2", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["suite", "params", "convention", "entries", "pass"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(v["suite"], "lemma31");
    assert_eq!(v["pass"], true);
    for e in v["entries"].as_array().unwrap() {
        for k in ["tag", "status", "nodes", "chain_len"] {
            assert!(e.get(k).is_some());
        }
    }
    let again = dir.path().join("r2.json");
    run(&["suite", "lemma31", "--n", "3", "--m", "2", "--m2", "2", "--json", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&json).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn usage_errors_exit_four() {
    assert_eq!(run(&["suite", "bogus"]).status.code(), Some(4));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(run(&["order", "--pres", "/nonexistent/p.txt"]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
