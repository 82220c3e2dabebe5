//! Generated corpora: the pipeline must recover exactly the planted truth.

use std::collections::BTreeSet;

use crossfire::corpus::{load_corpus, write_corpus};
use crossfire::pipeline::{analyze, RunConfig};
use crossfire::snapshot::validate;
use crossfire::synth::fixtures::two_tests;
use crossfire::synth::{generate_corpus, GeneratedCorpus, ScenarioSpec, TruthCandidate};

fn corpora(n: u64) -> impl Iterator<Item = GeneratedCorpus> {
    (0..n).map(|seed| generate_corpus(&ScenarioSpec::sized(seed, 8, 30)).expect("valid spec"))
}

fn recovered(g: &GeneratedCorpus) -> (crossfire::pipeline::Analysis, Vec<TruthCandidate>) {
    let a = analyze(&g.corpus, &RunConfig::default()).unwrap();
    let mut cands: Vec<TruthCandidate> = a
        .matrix
        .candidates
        .iter()
        .map(|c| TruthCandidate {
            test_id: c.test_id.clone(),
            variable: c.variable.clone(),
            node_id: c.node_id.clone(),
            assertion_kind: c.assertion_kind,
            expected: c.expected.clone(),
            depth: c.depth,
            kills: c.kills.clone(),
        })
        .collect();
    cands.sort();
    (a, cands)
}

#[test]
fn records_and_killable_match_truth() {
    for (seed, g) in corpora(40).enumerate() {
        let (a, cands) = recovered(&g);
        assert!(a.mask_errors.is_empty(), "seed {seed}: {:?}", a.mask_errors);
        assert!(a.diffs.iter().all(|d| d.errors.is_empty()), "seed {seed}");
        assert_eq!(a.records, g.truth.records, "seed {seed}");
        assert_eq!(a.matrix.killable_mutants, g.truth.killable, "seed {seed}");
        let mut truth = g.truth.candidates.clone();
        truth.sort();
        assert_eq!(cands, truth, "seed {seed}");
    }
}

#[test]
fn masked_plantings_leave_no_record() {
    let mut hidden = 0;
    for g in corpora(40) {
        hidden += g.truth.masked_plantings;
        let (a, _) = recovered(&g);
        let planted: BTreeSet<&str> = g.truth.records.iter().map(|r| r.mutant_id.as_str()).collect();
        assert!(a.records.iter().all(|r| planted.contains(r.mutant_id.as_str())));
    }
    assert!(hidden > 0, "the sample should exercise masking");
}

#[test]
fn generated_snapshots_validate() {
    for g in corpora(20).chain(std::iter::once(two_tests())) {
        let c = &g.corpus;
        for run in c.originals.values().flatten().chain(c.mutant_runs.values().flat_map(|m| m.values())) {
            let v = validate(run, &c.manifest);
            assert!(v.is_empty(), "{} run {}: {v:?}", run.test_id, run.run_index);
        }
    }
}

#[test]
fn written_corpus_loads_back_cleanly() {
    for g in corpora(10).chain(std::iter::once(two_tests())) {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path(), &g.corpus).unwrap();
        let loaded = load_corpus(dir.path()).unwrap();
        assert!(loaded.problems.is_empty(), "{:?}", loaded.problems);
        assert_eq!(loaded.corpus, g.corpus);
    }
}

#[test]
fn test_greedy_needs_fewer_tests_on_average() {
    use crossfire::select::Strategy;
    for g in corpora(15) {
        let (a, _) = recovered(&g);
        let tests = |s: Strategy| a.selections.iter().find(|x| x.strategy == s).unwrap().mean_tests.clone();
        assert!(tests(Strategy::TestGreedy) <= tests(Strategy::AssertionGreedy));
        let vars = |s: Strategy| a.selections.iter().find(|x| x.strategy == s).unwrap().mean_variables.clone();
        assert!(vars(Strategy::VariableGreedy) <= vars(Strategy::AssertionGreedy));
    }
}
