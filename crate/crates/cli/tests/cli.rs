use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crossfire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossfire"))
        .args(args)
        .env_remove("CROSSFIRE_CORPUS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = crossfire(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_pipeline_suggests_the_shared_field() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("example");
    ok(&["gen", s(&corpus), "--example"]);
    assert!(corpus.join("truth.json").is_file());
    ok(&["pipeline", s(&corpus)]);
    let cards = fs::read_to_string(corpus.join("out/suggestions.jsonl")).unwrap();
    let shared = cards
        .lines()
        .find(|v| v.contains("\"node_id\":\"var1.f2\""))
        .expect("a card for var1.f2");
    assert!(shared.contains("\"m1\"") && shared.contains("\"m2\""), "{shared}");
    let report = fs::read_to_string(corpus.join("out/report.md")).unwrap();
    assert!(report.contains("3/4 (75%)"));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crossfire(&["validate", s(dir.path())]).status.code(), Some(2));

    let corpus = dir.path().join("c");
    ok(&["gen", s(&corpus), "--seed", "3", "--tests", "2", "--mutants", "5"]);
    let out = ok(&["validate", s(&corpus)]);
    assert!(out.contains("0 problems"), "{out}");

    let snap = corpus.join("runs/original/run-1");
    let victim = fs::read_dir(&snap).unwrap().next().unwrap().unwrap().path();
    fs::write(&victim, b"{\"test_id\": ").unwrap();
    let out = crossfire(&["validate", s(&corpus)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1 problems"));
}

#[test]
fn select_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["gen", s(&corpus), "--seed", "11", "--tests", "4", "--mutants", "25"]);
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        ok(&[
            "select", s(&corpus), "--out", s(&out), "--strategy", "test-greedy", "--repeats", "20", "--seed", "7",
            "--jobs", jobs,
        ]);
        outputs.push((fs::read(out.join("selection.json")).unwrap(), fs::read(out.join("matrix.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn cached_stages_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["gen", s(&corpus), "--example"]);
    ok(&["matrix", s(&corpus)]);
    let out = ok(&["pipeline", s(&corpus)]);
    assert!(out.contains("matrix: up to date"), "{out}");
    assert!(out.contains("select: done"), "{out}");
}

#[test]
fn bad_settings_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["gen", s(&corpus), "--example"]);
    assert_eq!(crossfire(&["pipeline", s(&corpus), "--runs", "1"]).status.code(), Some(2));
    assert_eq!(crossfire(&["pipeline", s(&corpus), "--runs", "50"]).status.code(), Some(2));
    assert_eq!(crossfire(&["gen", s(&dir.path().join("g")), "--surviving", "2.0"]).status.code(), Some(2));
}

#[test]
fn corpus_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", s(dir.path()), "--example"]);
    let out = Command::new(env!("CARGO_BIN_EXE_crossfire"))
        .arg("validate")
        .env("CROSSFIRE_CORPUS", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
}
