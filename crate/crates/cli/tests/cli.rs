use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn uhg(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_uhg")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C5: &str = r#"{"n": 5, "vcolors": [0, 0, 0, 0, 0], "edges": [[0, 1, 1], [1, 2, 1], [2, 3, 1], [3, 4, 1], [4, 0, 1]]}"#;

#[test]
fn gen_emits_dot() {
    let r = uhg(&["gen", "tri(t=2)", "--format", "dot"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("digraph G {"));
    assert_eq!(r.stdout.matches(" -> ").count(), 3 + 3 + 6);
}

#[test]
fn gen_json_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let r = uhg(&["gen", "union(H0, chain(E;n=2,t=3;blow=EnC3@1))"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let p = write(&dir, "g.json", &r.stdout);
    let c = uhg(&["check", s(&p), "--format", "summary"]);
    assert_eq!(c.code, 0);
    assert!(c.stdout.starts_with("ultrahomogeneous"));
}

#[test]
fn five_cycle_is_rejected_with_a_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "c5.json", C5);
    let r = uhg(&["check", s(&p)]);
    assert_eq!(r.code, 1);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["ultrahomogeneous"], false);
    assert!(v["witness"]["domain"].is_array());
    let c = uhg(&["classify", s(&p), "--format", "summary"]);
    assert_eq!(c.code, 1);
    assert!(c.stdout.contains("witness"));
}

#[test]
fn malformed_json_names_the_position() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", "{\"n\": 2,\n \"vcolors\": [0, 0,\n}");
    let r = uhg(&["check", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.json") && r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn budget_errors_name_the_cap() {
    let r = uhg(&["gen", "E(n=3)"]);
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "e3.json", &r.stdout);
    let r = uhg(&["check", s(&p), "--budget", "uh_max_n=2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cap is 2"), "{}", r.stderr);
    assert_eq!(uhg(&["check", s(&p), "--budget", "bogus=1"]).code, 2);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(uhg(&["gen", "tri(t=)"]).code, 2);
    assert_eq!(uhg(&["frobnicate"]).code, 2);
    assert_eq!(uhg(&["gen", "C4", "--format", "xml"]).code, 2);
    assert_eq!(uhg(&["check", "/nonexistent/graph.json"]).code, 2);
    assert_eq!(uhg(&["--help"]).code, 0);
}

#[test]
fn verify_lachlan_five() {
    let r = uhg(&["verify", "lachlan", "--max-n", "5", "--format", "summary"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("matches the classification"));
    let j = uhg(&["verify", "lachlan", "--max-n", "5"]);
    let v: serde_json::Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(v["uh"].as_array().unwrap().len(), 7);
}

#[test]
fn output_does_not_depend_on_jobs() {
    let a = uhg(&["verify", "bichromatic", "--max-total", "5", "--jobs", "1"]);
    let b = uhg(&["verify", "bichromatic", "--max-total", "5", "--jobs", "3"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let x = uhg(&["verify", "extension", "--random", "20", "--class-max", "2", "--seed", "5", "--jobs", "1"]);
    let y = uhg(&["verify", "extension", "--random", "20", "--class-max", "2", "--seed", "5", "--jobs", "2"]);
    assert_eq!(x.code, 0, "{}", x.stderr);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn resume_reuses_a_checkpoint() {
    let dir = TempDir::new().unwrap();
    let ck = dir.path().join("progress.json");
    let a = uhg(&["verify", "lachlan", "--max-n", "5", "--resume", s(&ck)]);
    assert!(ck.exists());
    let b = uhg(&["verify", "lachlan", "--max-n", "5", "--resume", s(&ck)]);
    assert_eq!((a.code, b.code), (0, 0));
    assert_eq!(a.stdout, b.stdout);
    let c = uhg(&["verify", "lachlan", "--max-n", "4", "--resume", s(&ck)]);
    assert_eq!(c.code, 2);
}

#[test]
fn aut_reports_group_data() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "h0.json", &uhg(&["gen", "H0"]).stdout);
    let r = uhg(&["aut", s(&p)]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["order"], "24");
    // trivial systems included
    assert_eq!(v["block_systems"].as_array().unwrap().len(), 3);
}

#[test]
fn extend_and_classify_a_two_class_graph() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "m.json", &uhg(&["gen", "tri(t=2)"]).stdout);
    let r = uhg(&["extend", s(&p), "--red", "0", "--blue", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(uhg(&["extend", s(&p), "--red", "0", "--blue", "0"]).code, 2);
    let c = uhg(&["classify", s(&p)]);
    assert_eq!(c.code, 0, "{}", c.stderr);
    let v: serde_json::Value = serde_json::from_str(&c.stdout).unwrap();
    assert_eq!(v["verdict"], "uh");
}

#[test]
fn equiv_compares_up_to_colors() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &uhg(&["gen", "C4"]).stdout);
    let b = write(
        &dir,
        "b.json",
        r#"{"n": 4, "vcolors": [3, 3, 3, 3], "edges": [[0, 2, 5], [2, 1, 5], [1, 3, 5], [3, 0, 5], [2, 0, 7], [1, 2, 7], [3, 1, 7], [0, 3, 7], [0, 1, 7], [1, 0, 7], [2, 3, 7], [3, 2, 7]]}"#,
    );
    let c = write(&dir, "c.json", &uhg(&["gen", "E(n=4)"]).stdout);
    assert_eq!(uhg(&["equiv", s(&a), s(&b)]).code, 0);
    assert_eq!(uhg(&["equiv", s(&a), s(&c), "--format", "summary"]).stdout, "not equivalent\n");
}
