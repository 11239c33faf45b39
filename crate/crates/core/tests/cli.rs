mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use trapgraph::decomp::{parse_td, validate};
use trapgraph::TannerGraph;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trapgraph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_graph(dir: &Path, name: &str, g: &TannerGraph) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, g.serialize_alist()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_hamming_reports_three_and_seven() {
    let dir = TempDir::new().unwrap();
    let alist = write_graph(dir.path(), "h.alist", &common::hamming74());
    let out = run(&[
        "analyze",
        "--alist",
        s(&alist),
        "--b",
        "0,1",
        "--witness",
        "--validate-oracle",
        "20",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "trapgraph/1");
    assert_eq!(v["code"]["n"], 7);
    assert_eq!(v["results"][0]["a_min"], 3);
    assert_eq!(v["results"][0]["count"], "7");
    assert_eq!(v["results"][0]["oracle_checked"], true);
    assert_eq!(v["results"][0]["witness"].as_array().unwrap().len(), 3);
    assert_eq!(v["results"][1]["a_min"], 1);
}

#[test]
fn analyze_text_output() {
    let dir = TempDir::new().unwrap();
    let alist = write_graph(dir.path(), "r.alist", &common::repetition2());
    let out = run(&["analyze", "--alist", s(&alist), "--text", "--no-timings"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("b=0: a_min=2 count=1"), "{text}");
}

#[test]
fn analyze_unreachable_b_reports_null() {
    let dir = TempDir::new().unwrap();
    let alist = write_graph(dir.path(), "r.alist", &common::repetition2());
    let out = run(&["analyze", "--alist", s(&alist), "--b", "2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["results"][0]["a_min"].is_null());
    assert!(v["results"][0]["count"].is_null());
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        run(&["analyze", "--alist", "/nonexistent/x.alist"])
            .status
            .code(),
        Some(1)
    );
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.alist");
    std::fs::write(&bad, "2 1\nx 2\n").unwrap();
    let out = run(&["analyze", "--alist", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn generate_is_reproducible_and_emits_width_ten() {
    let dir = TempDir::new().unwrap();
    let (a1, a2, td) = (
        dir.path().join("a1"),
        dir.path().join("a2"),
        dir.path().join("sc.td"),
    );
    for a in [&a1, &a2] {
        let out = run(&[
            "generate",
            "--sc",
            "3,4,10,2",
            "--deg",
            "3",
            "--seed",
            "7",
            "--out",
            s(a),
            "--emit-td",
            s(&td),
        ]);
        assert!(out.status.success());
    }
    let b1 = std::fs::read(&a1).unwrap();
    assert_eq!(b1, std::fs::read(&a2).unwrap());
    let g = TannerGraph::parse_alist(&b1).unwrap();
    assert_eq!((g.n_var(), g.n_chk()), (40, 33));
    let (t, n) = parse_td(&std::fs::read_to_string(&td).unwrap()).unwrap();
    assert_eq!(n, 73);
    assert_eq!(t.width(), 10);
    assert!(validate(&g, &t).is_valid());

    let out = run(&["decomp", "validate", "--alist", s(&a1), "--td", s(&td)]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "valid, width 10"
    );
}

#[test]
fn generate_warns_on_wide_window_and_rejects_large_degree() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let out = run(&["generate", "--sc", "3,4,1,2", "--out", s(&a)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let out = run(&["generate", "--sc", "3,4,5,2", "--deg", "7", "--out", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn brute_lists_records() {
    let dir = TempDir::new().unwrap();
    let rep = write_graph(dir.path(), "r.alist", &common::repetition2());
    let ham = write_graph(dir.path(), "h.alist", &common::hamming74());

    let out = run(&["brute", "--alist", s(&rep), "--a-max", "2", "--b", "0"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, serde_json::json!([{"a": 2, "b": 0, "members": [0, 1]}]));

    let out = run(&["brute", "--alist", s(&ham), "--a-max", "3", "--b", "0"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7);

    let out = run(&["brute", "--alist", s(&ham), "--a-max", "0", "--b", "0"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "[]");
}

#[test]
fn work_limit_exits_three() {
    let dir = TempDir::new().unwrap();
    let ham = write_graph(dir.path(), "h.alist", &common::hamming74());
    let out = run(&[
        "brute",
        "--alist",
        s(&ham),
        "--a-max",
        "7",
        "--b",
        "0",
        "--limit",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&[
        "analyze",
        "--alist",
        s(&ham),
        "--validate-oracle",
        "10",
        "--limit",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decomp_subcommands() {
    let dir = TempDir::new().unwrap();
    let g = common::hamming74();
    let alist = write_graph(dir.path(), "h.alist", &g);
    let td = dir.path().join("h.td");

    let out = run(&["decomp", "heuristic", "--alist", s(&alist), "--out", s(&td)]);
    assert!(out.status.success());
    let (heur, _) = parse_td(&std::fs::read_to_string(&td).unwrap()).unwrap();
    assert!(validate(&g, &heur).is_valid());

    let out = run(&["decomp", "nice", "--alist", s(&alist), "--td", s(&td)]);
    assert!(out.status.success());
    let (nice, _) = parse_td(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(validate(&g, &nice).is_valid());
    assert_eq!(nice.width(), heur.width());

    // A single bag missing one node leaves that node uncovered.
    let broken = dir.path().join("broken.td");
    std::fs::write(&broken, "s td 1 9 10\nb 1 1 2 3 4 5 6 7 8 9\n").unwrap();
    let out = run(&[
        "decomp",
        "validate",
        "--alist",
        s(&alist),
        "--td",
        s(&broken),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("violation"));
}
