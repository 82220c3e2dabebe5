use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use crossfire::matrix::CandidateMatrix;
use crossfire::pipeline::{analyze, Analysis, RunConfig};
use crossfire::select::{run_repeated, select, shortest_depth_filter, Strategy, TieBreak};
use crossfire::snapshot::{
    canonicalize, parse, path, serialize, GraphEdge, NodeKind, VariableGraph,
};
use crossfire::synth::{generate_corpus, GeneratedCorpus, ScenarioSpec};

fn small(seed: u64) -> GeneratedCorpus {
    let spec = ScenarioSpec { seed, tests: 3, mutants: 10, n_runs: 4, ..ScenarioSpec::default() };
    generate_corpus(&spec).unwrap()
}

fn analysed(seed: u64) -> (GeneratedCorpus, Analysis) {
    let g = small(seed);
    let a = analyze(&g.corpus, &RunConfig { repeats: 3, ..RunConfig::default() }).unwrap();
    (g, a)
}

/// Undoes canonicalization: fresh ids from `perm`, back references replaced
/// by direct edges to their targets, nodes and edges reordered.
fn scramble(g: &VariableGraph, perm: &[usize]) -> VariableGraph {
    let owned: Vec<&str> = g
        .nodes
        .iter()
        .filter(|n| n.kind != NodeKind::BackReference)
        .map(|n| n.node_id.as_str())
        .collect();
    let fresh: BTreeMap<&str, String> = owned
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, format!("@{}", perm[i % perm.len()] * 1000 + i)))
        .collect();
    let target_of = |id: &str| -> String {
        match g.node(id) {
            Some(n) if n.kind == NodeKind::BackReference => fresh[n.ref_target.as_deref().unwrap()].clone(),
            _ => fresh[id].clone(),
        }
    };
    let mut nodes: Vec<_> = g
        .nodes
        .iter()
        .filter(|n| n.kind != NodeKind::BackReference)
        .map(|n| {
            let mut n = n.clone();
            n.node_id = fresh[n.node_id.as_str()].clone();
            n
        })
        .collect();
    let mut edges: Vec<GraphEdge> = g
        .edges
        .iter()
        .map(|e| GraphEdge::new(fresh[e.parent.as_str()].clone(), e.label.clone(), target_of(&e.child)))
        .collect();
    nodes.sort_by_key(|n| n.node_id.clone());
    edges.reverse();
    VariableGraph { variable: g.variable.clone(), root: fresh[g.root.as_str()].clone(), nodes, edges, structure_hash: 0 }
}

fn all_graphs(g: &GeneratedCorpus) -> impl Iterator<Item = &VariableGraph> {
    let c = &g.corpus;
    c.originals
        .values()
        .flatten()
        .chain(c.mutant_runs.values().flat_map(|m| m.values()))
        .flat_map(|r| &r.variables)
}

fn matrices(a: &Analysis) -> [&CandidateMatrix; 2] {
    [&a.matrix, &a.selected_from]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn canonical_graphs_are_fixed_points(seed in any::<u64>(), perm in proptest::collection::vec(0usize..50, 1..8)) {
        let g = small(seed);
        for graph in all_graphs(&g) {
            prop_assert_eq!(&canonicalize(graph).unwrap(), graph);
            let rebuilt = canonicalize(&scramble(graph, &perm)).unwrap();
            prop_assert_eq!(&rebuilt, graph);
        }
    }

    #[test]
    fn snapshots_round_trip(seed in any::<u64>()) {
        let g = small(seed);
        let c = &g.corpus;
        for run in c.originals.values().flatten().chain(c.mutant_runs.values().flat_map(|m| m.values())) {
            let bytes = serialize(run);
            let back = parse(&bytes).unwrap();
            prop_assert_eq!(&back, run);
            prop_assert_eq!(serialize(&back), bytes);
        }
    }

    #[test]
    fn masks_partition_and_agree(seed in any::<u64>()) {
        let (g, a) = analysed(seed);
        for (test, mask) in &a.masks.masks {
            let runs = &g.corpus.originals[test];
            for vm in &mask.variables {
                prop_assert!(vm.deterministic.is_disjoint(&vm.nondeterministic));
                let seen: BTreeSet<String> = runs
                    .iter()
                    .filter_map(|r| r.variable(&vm.variable))
                    .flat_map(|v| v.nodes.iter().map(|n| n.node_id.clone()))
                    .collect();
                let covered: BTreeSet<String> = vm.deterministic.union(&vm.nondeterministic).cloned().collect();
                prop_assert_eq!(&covered, &seen);
                // Every deterministic node looks the same in every run.
                for id in &vm.deterministic {
                    let views: Vec<_> = runs
                        .iter()
                        .map(|r| r.variable(&vm.variable).and_then(|v| v.node(id)))
                        .collect();
                    prop_assert!(views.windows(2).all(|w| w[0] == w[1]), "{} {}", test, id);
                }
            }
        }
    }

    #[test]
    fn diff_halts_at_the_first_difference(seed in any::<u64>()) {
        let (_, a) = analysed(seed);
        let mut by_view: BTreeMap<_, Vec<&str>> = BTreeMap::new();
        for r in &a.records {
            by_view.entry((&r.mutant_id, &r.test_id, &r.variable)).or_default().push(&r.node_id);
        }
        for nodes in by_view.values() {
            for x in nodes {
                prop_assert!(!nodes.iter().any(|y| path::is_descendant(x, y)), "{} below another record", x);
            }
        }
    }

    #[test]
    fn depth_filter_keeps_every_killable_mutant(seed in any::<u64>()) {
        let (_, a) = analysed(seed);
        let filtered = shortest_depth_filter(&a.matrix);
        prop_assert_eq!(&filtered.killable_mutants, &a.matrix.killable_mutants);
        let mut min: BTreeMap<&str, u32> = BTreeMap::new();
        for c in &a.matrix.candidates {
            for m in &c.kills {
                let e = min.entry(m.as_str()).or_insert(c.depth);
                *e = (*e).min(c.depth);
            }
        }
        for c in &filtered.candidates {
            prop_assert!(a.matrix.candidate(&c.candidate_id).is_some());
            prop_assert!(!c.kills.is_empty());
            prop_assert!(c.kills.iter().all(|m| min[m.as_str()] == c.depth));
        }
    }

    #[test]
    fn every_strategy_covers_everything(seed in any::<u64>(), pick in any::<u64>()) {
        let (_, a) = analysed(seed);
        for m in matrices(&a) {
            for s in Strategy::ALL {
                for tb in [TieBreak::Random, TieBreak::Lexicographic] {
                    let sel = select(m, s, pick, tb);
                    prop_assert_eq!(&sel.covered, &m.killable_mutants);
                    prop_assert!(sel.n_assertions >= sel.n_variables && sel.n_variables >= sel.n_tests);
                    prop_assert_eq!(sel.n_assertions as usize, sel.chosen.len());
                    prop_assert!(sel.chosen.iter().all(|c| !c.new_kills.is_empty()));
                }
            }
        }
    }

    #[test]
    fn selection_is_a_function_of_the_seed(seed in any::<u64>(), base in any::<u32>()) {
        let (_, a) = analysed(seed);
        for s in Strategy::ALL {
            let x = run_repeated(&a.selected_from, s, 4, base as u64, TieBreak::Random);
            let y = run_repeated(&a.selected_from, s, 4, base as u64, TieBreak::Random);
            prop_assert_eq!(x, y);
        }
    }
}
