//! Files as an external harness would write them: pretty-printed, keys in
//! any order, no canonical form.

use std::fs;
use std::path::Path;

use crossfire::corpus::{load_corpus, write_corpus};
use crossfire::pipeline::{analyze, RunConfig};
use crossfire::synth::fixtures::two_tests;

fn reformat(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            reformat(&p);
        } else if p.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_slice(&fs::read(&p).unwrap()).unwrap();
            fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
        }
    }
}

#[test]
fn pretty_printed_corpus_loads_the_same() {
    let g = two_tests();
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &g.corpus).unwrap();
    reformat(dir.path());
    let snap = fs::read_to_string(dir.path().join("runs/original/run-0/Test1.snap.json")).unwrap();
    assert!(snap.contains("\n  "));

    let loaded = load_corpus(dir.path()).unwrap();
    assert!(loaded.problems.is_empty(), "{:?}", loaded.problems);
    assert_eq!(loaded.corpus, g.corpus);
    let a = analyze(&loaded.corpus, &RunConfig::default()).unwrap();
    assert_eq!(a.records, g.truth.records);
}

#[test]
fn kill_lines_with_blank_lines_and_crlf() {
    let g = two_tests();
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &g.corpus).unwrap();
    let text = fs::read_to_string(dir.path().join("kills.jsonl")).unwrap();
    fs::write(dir.path().join("kills.jsonl"), format!("\r\n{}\r\n", text.replace('\n', "\r\n"))).unwrap();
    let loaded = load_corpus(dir.path()).unwrap();
    assert!(loaded.problems.is_empty(), "{:?}", loaded.problems);
    assert_eq!(loaded.corpus.kills.len(), 2);
}

#[test]
fn problems_name_the_file() {
    let g = two_tests();
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &g.corpus).unwrap();
    let victim = dir.path().join("runs/mutants/m1/Test1.snap.json");
    let text = fs::read_to_string(&victim).unwrap().replace("\"var1.f2\"", "\"var1.g2\"");
    fs::write(&victim, text).unwrap();
    fs::write(dir.path().join("runs/original/run-0/Stray.txt"), "x").unwrap();

    let loaded = load_corpus(dir.path()).unwrap();
    let files: Vec<String> = loaded.problems.iter().map(|p| p.file.clone()).collect();
    assert_eq!(files.len(), 2, "{:?}", loaded.problems);
    assert!(files.iter().any(|f| f.ends_with("m1/Test1.snap.json")));
    assert!(files.iter().any(|f| f.ends_with("Stray.txt")));
}
