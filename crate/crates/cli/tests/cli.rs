use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathdepth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_build_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let forest = dir.path().join("f.txt");
    let trace = dir.path().join("t.json");
    let out = run(&[
        "generate",
        "--family",
        "blowup",
        "--b",
        "4",
        "--c",
        "2",
        "--out",
        path_str(&graph),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "build",
        "--graph",
        path_str(&graph),
        "--audit",
        "per-round",
        "--trace",
        path_str(&trace),
        "--forest",
        path_str(&forest),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["b"], 4);
    assert!(doc["rounds"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["weight"].is_string()));
    let out = run(&[
        "verify",
        "--graph",
        path_str(&graph),
        "--forest",
        path_str(&forest),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("elimination forest valid"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("p4.txt");
    fs::write(&graph, "n 4\n0 1\n1 2\n2 3\n").unwrap();
    // P_4 has a 4-vertex path, so b = 2 breaks the promise
    let out = run(&["build", "--graph", path_str(&graph), "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let pd = dir.path().join("pd.txt");
    fs::write(&pd, "0 1\n1 2\n2 3\n").unwrap();
    let out = run(&[
        "build",
        "--graph",
        path_str(&graph),
        "--pd",
        path_str(&pd),
        "--b",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2), "unlinked decomposition");
    let out = run(&[
        "build",
        "--graph",
        path_str(&graph),
        "--pd",
        path_str(&pd),
        "--b",
        "3",
        "--link",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "link",
        "--graph",
        path_str(&graph),
        "--pd",
        path_str(&pd),
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(2));

    fs::write(&graph, "0 1\n").unwrap();
    let out = run(&["oracle", "--graph", path_str(&graph)]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "missing header is a parse error"
    );
}

#[test]
fn corpus_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let path = dir.path().join(name);
        let out = run(&[
            "corpus",
            "--seed",
            "5",
            "--count",
            "8",
            "--n-max",
            "9",
            "--a",
            "3",
            "--audit",
            "per-round",
            "--out",
            path_str(&path),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        reports.push((fs::read(&path).unwrap(), out.stdout));
    }
    assert_eq!(reports[0], reports[1]);
    let lines = String::from_utf8(reports[0].0.clone()).unwrap();
    assert_eq!(lines.lines().count(), 8);
    for line in lines.lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["ok"], true);
    }
}

#[test]
fn build_traces_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    run(&[
        "generate",
        "--family",
        "random-pw",
        "--n",
        "11",
        "--a",
        "3",
        "--seed",
        "3",
        "--out",
        path_str(&graph),
    ]);
    let mut traces = Vec::new();
    for name in ["t1.json", "t2.json"] {
        let trace = dir.path().join(name);
        let out = run(&[
            "build",
            "--graph",
            path_str(&graph),
            "--audit",
            "per-round",
            "--trace",
            path_str(&trace),
        ]);
        assert!(out.status.success());
        traces.push(fs::read(&trace).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
}

#[test]
fn empty_corpus_exits_cleanly() {
    let out = run(&["corpus", "--count", "0"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 rows, 0 failed"));
}
