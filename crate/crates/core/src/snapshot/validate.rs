//! Invariant checks for canonical graphs and snapshots.
//!
//! Violations are data: callers decide whether to reject or report.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::canonicalize::structural_hash;
use super::model::{
    EdgeLabel, MutantManifest, MutantStatus, NodeKind, ProgramVersion, TestRunSnapshot,
    VariableGraph,
};
use super::path;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    /// Where the problem is, e.g. `variables[1].nodes[4]`.
    pub location: String,
    pub message: String,
}

impl Violation {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.location, self.message)
        }
    }
}

/// Every invariant a canonical variable graph must satisfy.
pub fn graph_violations(graph: &VariableGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |loc: String, msg: String| out.push(Violation::new(loc, msg));

    if !path::is_valid_segment(&graph.variable.name) {
        push("variable.name".into(), "contains path punctuation".into());
    }
    if graph.root != graph.variable.name {
        push(
            "root".into(),
            format!("root id {:?} is not the variable name", graph.root),
        );
    }
    if graph.nodes.first().map(|n| n.node_id.as_str()) != Some(graph.root.as_str()) {
        push("nodes".into(), "first node must be the root".into());
    }

    let mut position: HashMap<&str, usize> = HashMap::with_capacity(graph.nodes.len());
    for (i, node) in graph.nodes.iter().enumerate() {
        if position.insert(node.node_id.as_str(), i).is_some() {
            push(format!("nodes[{i}]"), format!("duplicate node id {:?}", node.node_id));
        }
    }

    let mut children: HashMap<&str, Vec<(usize, &EdgeLabel)>> = HashMap::new();
    let mut incoming: HashMap<&str, usize> = HashMap::new();
    for (i, edge) in graph.edges.iter().enumerate() {
        let loc = format!("edges[{i}]");
        if !position.contains_key(edge.parent.as_str()) {
            push(loc.clone(), format!("unknown parent {:?}", edge.parent));
        }
        if !position.contains_key(edge.child.as_str()) {
            push(loc.clone(), format!("unknown child {:?}", edge.child));
        }
        if let EdgeLabel::Field(name) = &edge.label {
            if !path::is_valid_segment(name) {
                push(loc.clone(), format!("invalid field label {name:?}"));
            }
        }
        if path::child_path(&edge.parent, &edge.label) != edge.child {
            push(
                loc.clone(),
                format!(
                    "child id {:?} is not the access path {}{}",
                    edge.child, edge.parent, edge.label
                ),
            );
        }
        *incoming.entry(edge.child.as_str()).or_default() += 1;
        children
            .entry(edge.parent.as_str())
            .or_default()
            .push((i, &edge.label));
    }

    let mut parents: Vec<&str> = children.keys().copied().collect();
    parents.sort_unstable();
    for parent in parents {
        let labels = &children[parent];
        let loc = format!("nodes[{}]", position.get(parent).copied().unwrap_or(usize::MAX));
        let mut seen = HashSet::new();
        for (_, label) in labels {
            if !seen.insert(*label) {
                push(loc.clone(), format!("duplicate label {label} under {parent:?}"));
            }
        }
        let has_index = labels.iter().any(|(_, l)| l.is_index());
        let has_field = labels.iter().any(|(_, l)| !l.is_index());
        if has_index && has_field {
            push(
                loc.clone(),
                format!("field and index labels mixed under {parent:?}"),
            );
        }
    }

    for (i, node) in graph.nodes.iter().enumerate() {
        let loc = format!("nodes[{i}]");
        let kids = children.get(node.node_id.as_str());
        let n_kids = kids.map_or(0, Vec::len);
        if node.kind.is_leaf() && n_kids > 0 {
            push(loc.clone(), format!("{} node has children", node.kind));
        }
        if (node.kind == NodeKind::Primitive) != node.value.is_some() {
            push(loc.clone(), "value must be present exactly on primitives".into());
        }
        if (node.kind == NodeKind::BackReference) != node.ref_target.is_some() {
            push(
                loc.clone(),
                "ref_target must be present exactly on back-references".into(),
            );
        }
        if (node.kind == NodeKind::Collection) != node.size.is_some() {
            push(loc.clone(), "size must be present exactly on collections".into());
        }
        if let (NodeKind::Collection, Some(size)) = (node.kind, node.size) {
            let mut idx: Vec<u64> = kids
                .into_iter()
                .flatten()
                .filter_map(|(_, l)| match l {
                    EdgeLabel::Index(i) => Some(*i),
                    EdgeLabel::Field(_) => None,
                })
                .collect();
            idx.sort_unstable();
            if idx.len() as u64 != size {
                push(
                    loc.clone(),
                    format!("size {size} but {} index edges", idx.len()),
                );
            } else if idx.iter().enumerate().any(|(k, &i)| k as u64 != i) {
                push(loc.clone(), "index labels are not the range [0, size)".into());
            }
        }
        if let Some(target) = &node.ref_target {
            match position.get(target.as_str()) {
                Some(&t) if t < i => {}
                Some(_) => push(loc.clone(), format!("ref_target {target:?} appears later")),
                None => push(loc.clone(), format!("unknown ref_target {target:?}")),
            }
        }
        if node.node_id != graph.root {
            match incoming.get(node.node_id.as_str()) {
                None => push(loc.clone(), format!("{:?} unreachable from root", node.node_id)),
                Some(&n) if n > 1 => {
                    push(loc.clone(), format!("{:?} has {n} incoming edges", node.node_id))
                }
                _ => {}
            }
        }
    }

    if out.is_empty() && structural_hash(graph) != graph.structure_hash {
        out.push(Violation::new(
            "structure_hash",
            "does not match the graph content",
        ));
    }
    out
}

/// Snapshot-level checks against the manifest, plus every graph check.
pub fn validate(snapshot: &TestRunSnapshot, manifest: &MutantManifest) -> Vec<Violation> {
    let mut out = Vec::new();
    if !manifest.has_test(&snapshot.test_id) {
        out.push(Violation::new(
            "test_id",
            format!("unknown test {:?}", snapshot.test_id),
        ));
    }
    match &snapshot.program_version {
        ProgramVersion::Original => {
            if snapshot.run_index >= manifest.n_runs {
                out.push(Violation::new(
                    "run_index",
                    format!(
                        "run index {} outside [0, {})",
                        snapshot.run_index, manifest.n_runs
                    ),
                ));
            }
        }
        ProgramVersion::Mutant(id) => {
            match manifest.mutant(id) {
                None => out.push(Violation::new(
                    "program_version",
                    format!("unknown mutant {id:?}"),
                )),
                Some(m) => {
                    if m.status != MutantStatus::Survived {
                        out.push(Violation::new(
                            "program_version",
                            format!("mutant {id:?} is not a surviving mutant"),
                        ));
                    }
                    if !m.covering_test_ids.contains(&snapshot.test_id) {
                        out.push(Violation::new(
                            "test_id",
                            format!("test {:?} does not cover mutant {id:?}", snapshot.test_id),
                        ));
                    }
                }
            }
            if snapshot.run_index != 0 {
                out.push(Violation::new(
                    "run_index",
                    "mutant snapshots must have run index 0",
                ));
            }
        }
    }
    let mut roots = BTreeSet::new();
    for (i, graph) in snapshot.variables.iter().enumerate() {
        if !roots.insert(&graph.variable) {
            out.push(Violation::new(
                format!("variables[{i}].variable"),
                format!("duplicate root variable {}", graph.variable),
            ));
        }
        for v in graph_violations(graph) {
            out.push(Violation::new(
                format!("variables[{i}].{}", v.location),
                v.message,
            ));
        }
    }
    out
}

pub fn manifest_violations(manifest: &MutantManifest) -> Vec<Violation> {
    let mut out = Vec::new();
    if manifest.n_runs < 2 {
        out.push(Violation::new("n_runs", "at least two original runs are required"));
    }
    let mut tests = HashSet::new();
    for (i, t) in manifest.tests.iter().enumerate() {
        if !tests.insert(t.as_str()) {
            out.push(Violation::new(format!("tests[{i}]"), format!("duplicate test {t:?}")));
        }
        if !is_file_safe(t) {
            out.push(Violation::new(
                format!("tests[{i}]"),
                format!("test id {t:?} is not usable as a file name"),
            ));
        }
    }
    let mut ids = HashSet::new();
    for (i, m) in manifest.mutants.iter().enumerate() {
        let loc = format!("mutants[{i}]");
        if !ids.insert(m.mutant_id.as_str()) {
            out.push(Violation::new(&loc, format!("duplicate mutant id {:?}", m.mutant_id)));
        }
        if m.mutant_id == "original" || !is_file_safe(&m.mutant_id) {
            out.push(Violation::new(&loc, format!("invalid mutant id {:?}", m.mutant_id)));
        }
        for t in &m.covering_test_ids {
            if !tests.contains(t.as_str()) {
                out.push(Violation::new(&loc, format!("covering test {t:?} not in tests")));
            }
        }
    }
    out
}

pub(crate) fn is_file_safe(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && !id.contains(['/', '\\', '\0'])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::{canonicalize, GraphEdge, GraphNode, MutantEntry, RootVariable};

    fn manifest() -> MutantManifest {
        MutantManifest {
            mutants: vec![MutantEntry {
                mutant_id: "m1".into(),
                location: "A.java:3".into(),
                operator: "negate".into(),
                status: MutantStatus::Survived,
                covering_test_ids: vec!["Test1".into()],
            }],
            tests: vec!["Test1".into()],
            n_runs: 3,
        }
    }

    fn snapshot(test: &str) -> TestRunSnapshot {
        let raw = VariableGraph::raw(RootVariable::local("x"), "n")
            .with_node(GraphNode::primitive("n", "int", "int:5"));
        TestRunSnapshot {
            program_version: ProgramVersion::Original,
            run_index: 0,
            test_id: test.into(),
            outcome: None,
            variables: vec![canonicalize(&raw).unwrap()],
        }
    }

    #[test]
    fn well_formed_snapshot_has_no_violations() {
        assert!(validate(&snapshot("Test1"), &manifest()).is_empty());
    }

    #[test]
    fn unknown_test_is_one_violation() {
        let v = validate(&snapshot("Nope"), &manifest());
        assert_eq!(v.len(), 1);
        assert!(v[0].message.starts_with("unknown test"));
    }

    #[test]
    fn mixed_labels_reported_once_per_parent() {
        // Three nodes: a collection with one index child and one field child.
        let mut g = VariableGraph {
            variable: RootVariable::local("v"),
            root: "v".into(),
            nodes: vec![
                GraphNode {
                    size: Some(1),
                    ..GraphNode::collection("v", "List")
                },
                GraphNode::null("v.extra", "T"),
                GraphNode::null("v[0]", "T"),
            ],
            edges: vec![
                GraphEdge::new("v", EdgeLabel::field("extra"), "v.extra"),
                GraphEdge::new("v", EdgeLabel::Index(0), "v[0]"),
            ],
            structure_hash: 0,
        };
        g.structure_hash = structural_hash(&g);
        let mut snap = snapshot("Test1");
        snap.variables = vec![g];
        let v = validate(&snap, &manifest());
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].message.contains("mixed"));
    }

    #[test]
    fn mutant_run_index_must_be_zero() {
        let mut s = snapshot("Test1");
        s.program_version = ProgramVersion::Mutant("m1".into());
        s.run_index = 1;
        assert_eq!(validate(&s, &manifest()).len(), 1);
    }

    #[test]
    fn stale_hash_is_reported() {
        let mut s = snapshot("Test1");
        s.variables[0].structure_hash ^= 1;
        let v = validate(&s, &manifest());
        assert_eq!(v[0].location, "variables[0].structure_hash");
    }

    #[test]
    fn manifest_checks() {
        let mut m = manifest();
        assert!(manifest_violations(&m).is_empty());
        m.mutants[0].covering_test_ids.push("Ghost".into());
        m.n_runs = 1;
        assert_eq!(manifest_violations(&m).len(), 2);
    }
}
