//! Halting breadth-first comparison of original and mutant object graphs.
//!
//! Matched graphs are walked from the root variable. Masked locations and
//! everything below them are skipped. The first difference found on a path
//! is recorded and the walk stops descending there, so within one variable
//! no record lies below another. A collection whose size changed yields one
//! size record and nothing for its elements.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::determinism::{MaskError, MaskSet, VariableMask};
use crate::snapshot::{
    path, EdgeLabel, GraphNode, MutantEntry, MutantStatus, NodeKind, RootVariable,
    TestRunSnapshot, VariableGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("cannot compare variable {0} with variable {1}")]
    VariableMismatch(String, String),
    #[error("graph for {0} is not canonical: {1}")]
    NotCanonical(String, String),
    #[error("cannot compare runs of different tests {0:?} and {1:?}")]
    TestMismatch(String, String),
    #[error("expected a mutant run, got program version {0:?}")]
    NotMutantRun(String),
    #[error("mutant {0:?} did not survive; only surviving mutants are analyzed")]
    NotSurviving(String),
    #[error("no snapshot for mutant {mutant:?} under test {test:?}")]
    MissingSnapshot { mutant: String, test: String },
    #[error("no original baseline for test {0:?}")]
    MissingBaseline(String),
    #[error(transparent)]
    Mask(#[from] MaskError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferenceKind {
    Value,
    Nullness,
    Type,
    CollectionSize,
    MissingStructure,
}

impl fmt::Display for DifferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DifferenceKind::Value => "value",
            DifferenceKind::Nullness => "nullness",
            DifferenceKind::Type => "type",
            DifferenceKind::CollectionSize => "collection-size",
            DifferenceKind::MissingStructure => "missing-structure",
        })
    }
}

/// Observed text for a location the mutant run does not have at all.
pub const ABSENT: &str = "<absent>";

/// One difference inside a single variable graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDifference {
    pub node_id: String,
    pub depth: u32,
    pub kind: DifferenceKind,
    pub expected: String,
    pub observed: String,
    /// Same shape, only the dynamic type name changed.
    pub type_name_only: bool,
}

/// A granular infection: what a surviving mutant changed, where, and
/// through which test variable it can be seen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionRecord {
    pub mutant_id: String,
    pub test_id: String,
    pub variable: RootVariable,
    pub node_id: String,
    pub depth: u32,
    pub difference_kind: DifferenceKind,
    pub expected: String,
    pub observed: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub type_name_only: bool,
}

impl InfectionRecord {
    fn from_difference(mutant_id: &str, test_id: &str, variable: &RootVariable, d: NodeDifference) -> Self {
        InfectionRecord {
            mutant_id: mutant_id.to_string(),
            test_id: test_id.to_string(),
            variable: variable.clone(),
            node_id: d.node_id,
            depth: d.depth,
            difference_kind: d.kind,
            expected: d.expected,
            observed: d.observed,
            type_name_only: d.type_name_only,
        }
    }

    pub fn sort_key(&self) -> (&str, &str, &RootVariable, &str) {
        (&self.mutant_id, &self.test_id, &self.variable, &self.node_id)
    }
}

pub fn sort_records(records: &mut [InfectionRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Compares one pair of matched variable graphs.
pub trait GraphComparator: Sync {
    fn compare(
        &self,
        original: &VariableGraph,
        mutant: &VariableGraph,
        mask: &VariableMask,
    ) -> Result<Vec<NodeDifference>, DiffError>;
}

/// The production comparator.
#[derive(Debug, Clone, Copy, Default)]
pub struct HaltingBfs;

impl GraphComparator for HaltingBfs {
    fn compare(
        &self,
        original: &VariableGraph,
        mutant: &VariableGraph,
        mask: &VariableMask,
    ) -> Result<Vec<NodeDifference>, DiffError> {
        diff_graphs(original, mutant, mask)
    }
}

struct Indexed<'a> {
    nodes: HashMap<&'a str, &'a GraphNode>,
    children: HashMap<&'a str, Vec<(&'a EdgeLabel, &'a str)>>,
}

impl<'a> Indexed<'a> {
    fn new(graph: &'a VariableGraph) -> Result<Self, DiffError> {
        let name = graph.variable.to_string();
        if graph.root != graph.variable.name
            || graph.nodes.first().map(|n| n.node_id.as_str()) != Some(graph.root.as_str())
        {
            return Err(DiffError::NotCanonical(name, "root is not the variable name".into()));
        }
        let nodes = graph.nodes.iter().map(|n| (n.node_id.as_str(), n)).collect();
        let mut children: HashMap<&str, Vec<_>> = HashMap::new();
        for e in &graph.edges {
            if path::child_path(&e.parent, &e.label) != e.child {
                return Err(DiffError::NotCanonical(
                    name,
                    format!("edge child {:?} is not an access path", e.child),
                ));
            }
            children
                .entry(e.parent.as_str())
                .or_default()
                .push((&e.label, e.child.as_str()));
        }
        Ok(Indexed { nodes, children })
    }
}

/// Halting BFS over one pair of graphs.
pub fn diff_graphs(
    original: &VariableGraph,
    mutant: &VariableGraph,
    mask: &VariableMask,
) -> Result<Vec<NodeDifference>, DiffError> {
    if original.variable != mutant.variable || original.variable != mask.variable {
        return Err(DiffError::VariableMismatch(
            original.variable.to_string(),
            mutant.variable.to_string(),
        ));
    }
    let orig = Indexed::new(original)?;
    let mutd = Indexed::new(mutant)?;

    let mut out = Vec::new();
    let mut queue = VecDeque::from([original.root.as_str()]);
    while let Some(id) = queue.pop_front() {
        if !mask.is_deterministic(id) {
            continue;
        }
        let (Some(o), Some(m)) = (orig.nodes.get(id), mutd.nodes.get(id)) else {
            // Parents only enqueue children present on both sides.
            continue;
        };
        let depth = path::depth(id) as u32;
        if let Some((kind, expected, observed, type_name_only)) = compare_nodes(o, m) {
            out.push(NodeDifference {
                node_id: id.to_string(),
                depth,
                kind,
                expected,
                observed,
                type_name_only,
            });
            continue;
        }

        let visible = |kids: Option<&Vec<(&EdgeLabel, &str)>>| -> Vec<(EdgeLabel, String)> {
            kids.into_iter()
                .flatten()
                .filter(|(_, c)| !mask.nondeterministic.contains(*c))
                .map(|(l, c)| ((*l).clone(), c.to_string()))
                .collect()
        };
        let o_kids = visible(orig.children.get(id));
        let m_kids = visible(mutd.children.get(id));
        let o_set: BTreeSet<&EdgeLabel> = o_kids.iter().map(|(l, _)| l).collect();
        let m_set: BTreeSet<&EdgeLabel> = m_kids.iter().map(|(l, _)| l).collect();
        if o_set != m_set {
            out.push(NodeDifference {
                node_id: id.to_string(),
                depth,
                kind: DifferenceKind::MissingStructure,
                expected: render_labels(&o_set),
                observed: render_labels(&m_set),
                type_name_only: false,
            });
            continue;
        }
        for &(_, child) in orig.children.get(id).into_iter().flatten() {
            if mask.is_deterministic(child) {
                queue.push_back(child);
            }
        }
    }
    Ok(out)
}

fn render_labels(labels: &BTreeSet<&EdgeLabel>) -> String {
    let parts: Vec<String> = labels
        .iter()
        .map(|l| match l {
            EdgeLabel::Field(f) => f.clone(),
            EdgeLabel::Index(i) => format!("[{i}]"),
        })
        .collect();
    format!("fields:{}", parts.join(","))
}

type NodeDelta = (DifferenceKind, String, String, bool);

fn compare_nodes(o: &GraphNode, m: &GraphNode) -> Option<NodeDelta> {
    if o.kind != m.kind {
        let kind = if o.kind == NodeKind::Null || m.kind == NodeKind::Null {
            DifferenceKind::Nullness
        } else {
            DifferenceKind::Type
        };
        return Some((kind, o.describe(), m.describe(), false));
    }
    let type_change = || {
        let (e, obs) = (o.describe(), m.describe());
        if e != obs {
            (DifferenceKind::Type, e, obs, true)
        } else {
            (
                DifferenceKind::Type,
                format!("{}:{}", o.kind, o.type_name),
                format!("{}:{}", m.kind, m.type_name),
                true,
            )
        }
    };
    match o.kind {
        NodeKind::Null => None,
        NodeKind::Primitive => {
            if o.type_name != m.type_name {
                Some(type_change())
            } else if o.value != m.value {
                Some((
                    DifferenceKind::Value,
                    o.value.clone().unwrap_or_default(),
                    m.value.clone().unwrap_or_default(),
                    false,
                ))
            } else {
                None
            }
        }
        NodeKind::Object | NodeKind::Truncated => {
            (o.type_name != m.type_name).then(type_change)
        }
        NodeKind::Collection => {
            if o.type_name != m.type_name {
                Some(type_change())
            } else if o.size != m.size {
                Some((
                    DifferenceKind::CollectionSize,
                    o.size.unwrap_or_default().to_string(),
                    m.size.unwrap_or_default().to_string(),
                    false,
                ))
            } else {
                None
            }
        }
        NodeKind::BackReference => {
            if o.ref_target != m.ref_target {
                Some((DifferenceKind::Type, o.describe(), m.describe(), false))
            } else if o.type_name != m.type_name {
                Some(type_change())
            } else {
                None
            }
        }
    }
}

/// Records and notices from one (original, mutant) test-run comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestRunDiff {
    pub records: Vec<InfectionRecord>,
    pub notices: Vec<String>,
}

pub fn diff_test_run(
    original_run: &TestRunSnapshot,
    mutant_run: &TestRunSnapshot,
    mask: &crate::determinism::DeterminismMask,
) -> Result<TestRunDiff, DiffError> {
    diff_test_run_with(original_run, mutant_run, mask, &HaltingBfs)
}

/// Per-variable diff of one test run. Variables whose (original graph,
/// mutant graph, mask) triple was already compared in this run are not
/// compared again; the earlier result is replayed under the alias.
pub fn diff_test_run_with(
    original_run: &TestRunSnapshot,
    mutant_run: &TestRunSnapshot,
    mask: &crate::determinism::DeterminismMask,
    comparator: &dyn GraphComparator,
) -> Result<TestRunDiff, DiffError> {
    if original_run.test_id != mutant_run.test_id {
        return Err(DiffError::TestMismatch(
            original_run.test_id.clone(),
            mutant_run.test_id.clone(),
        ));
    }
    if mask.test_id != original_run.test_id {
        return Err(DiffError::TestMismatch(
            original_run.test_id.clone(),
            mask.test_id.clone(),
        ));
    }
    let mutant_id = mutant_run
        .program_version
        .mutant_id()
        .ok_or_else(|| DiffError::NotMutantRun(mutant_run.program_version.to_string()))?;
    let test_id = &original_run.test_id;

    let mut out = TestRunDiff::default();
    let mut seen: HashMap<(u64, u64, u64), (&str, Vec<NodeDifference>)> = HashMap::new();
    let mut originals: Vec<&VariableGraph> = original_run.variables.iter().collect();
    originals.sort_by(|a, b| a.variable.cmp(&b.variable));

    for og in originals {
        let variable = &og.variable;
        let Some(slice) = mask.variable(variable) else {
            out.notices.push(format!(
                "{test_id}: variable {variable} missing from the mask; skipped"
            ));
            continue;
        };
        let Some(mg) = mutant_run.variable(variable) else {
            if slice.is_deterministic(&og.root) {
                let root = &og.nodes[0];
                out.records.push(InfectionRecord::from_difference(
                    mutant_id,
                    test_id,
                    variable,
                    NodeDifference {
                        node_id: og.root.clone(),
                        depth: 1,
                        kind: DifferenceKind::MissingStructure,
                        expected: root.describe(),
                        observed: ABSENT.to_string(),
                        type_name_only: false,
                    },
                ));
            }
            continue;
        };
        let key = (og.structure_hash, mg.structure_hash, slice.fingerprint);
        let diffs = match seen.get(&key) {
            Some((root, diffs)) => diffs
                .iter()
                .map(|d| NodeDifference {
                    node_id: path::rebase(&d.node_id, root, &og.root),
                    ..d.clone()
                })
                .collect(),
            None => {
                let diffs = comparator.compare(og, mg, slice)?;
                seen.insert(key, (og.root.as_str(), diffs.clone()));
                diffs
            }
        };
        out.records.extend(
            diffs
                .into_iter()
                .map(|d| InfectionRecord::from_difference(mutant_id, test_id, variable, d)),
        );
    }

    for mg in &mutant_run.variables {
        if original_run.variable(&mg.variable).is_none() && mask.variable(&mg.variable).is_none() {
            let notice = format!(
                "{test_id}: variable {} exists only under mutant {mutant_id}; not assertable",
                mg.variable
            );
            info!("{notice}");
            out.notices.push(notice);
        }
    }
    sort_records(&mut out.records);
    Ok(out)
}

/// Everything found for one surviving mutant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MutantDiff {
    pub mutant_id: String,
    pub records: Vec<InfectionRecord>,
    /// Per-test failures; the other covering tests are still processed.
    pub errors: Vec<(String, String)>,
    pub notices: Vec<String>,
}

/// Diffs every covering test of one surviving mutant.
///
/// `baselines` maps test id to the reference original run (run index 0);
/// `covering_runs` maps test id to the mutant's run of that test.
pub fn diff_mutant(
    mutant: &MutantEntry,
    covering_runs: &BTreeMap<String, TestRunSnapshot>,
    baselines: &BTreeMap<String, TestRunSnapshot>,
    masks: &MaskSet,
) -> Result<MutantDiff, DiffError> {
    if mutant.status != MutantStatus::Survived {
        return Err(DiffError::NotSurviving(mutant.mutant_id.clone()));
    }
    let mut out = MutantDiff {
        mutant_id: mutant.mutant_id.clone(),
        ..Default::default()
    };
    let mut tests: Vec<&String> = mutant.covering_test_ids.iter().collect();
    tests.sort();
    tests.dedup();
    for test in tests {
        let result = (|| {
            let run = covering_runs.get(test).ok_or_else(|| DiffError::MissingSnapshot {
                mutant: mutant.mutant_id.clone(),
                test: test.clone(),
            })?;
            let baseline = baselines
                .get(test)
                .ok_or_else(|| DiffError::MissingBaseline(test.clone()))?;
            let mask = masks
                .get(test)
                .ok_or_else(|| DiffError::MissingBaseline(test.clone()))?;
            diff_test_run(baseline, run, mask)
        })();
        match result {
            Ok(d) => {
                out.records.extend(d.records);
                out.notices.extend(d.notices);
            }
            Err(e) => out.errors.push((test.clone(), e.to_string())),
        }
    }
    sort_records(&mut out.records);
    Ok(out)
}

/// Runs [`diff_mutant`] over many mutants concurrently. The result is
/// sorted by mutant id and does not depend on scheduling.
pub fn diff_all<'a, F>(
    mutants: &[&'a MutantEntry],
    covering_runs: F,
    baselines: &BTreeMap<String, TestRunSnapshot>,
    masks: &MaskSet,
) -> Vec<MutantDiff>
where
    F: Fn(&'a MutantEntry) -> (BTreeMap<String, TestRunSnapshot>, Vec<(String, String)>) + Sync,
{
    let mut diffs: Vec<MutantDiff> = mutants
        .par_iter()
        .map(|m| {
            let (runs, load_errors) = covering_runs(m);
            let mut d = diff_mutant(m, &runs, baselines, masks).unwrap_or_else(|e| MutantDiff {
                mutant_id: m.mutant_id.clone(),
                errors: vec![(String::new(), e.to_string())],
                ..Default::default()
            });
            // A load failure replaces the generic missing-snapshot error.
            for (test, message) in load_errors {
                d.errors.retain(|(t, _)| t != &test);
                d.errors.push((test, message));
            }
            d.errors.sort();
            d
        })
        .collect();
    diffs.sort_by(|a, b| a.mutant_id.cmp(&b.mutant_id));
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinism::{build_mask, DeterminismMask};
    use crate::snapshot::{canonicalize, ProgramVersion};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn list(var: &str, values: &[&str]) -> VariableGraph {
        // holder.items -> [values...], holder.tag -> "t"
        let mut raw = VariableGraph::raw(RootVariable::local(var), "h")
            .with_node(GraphNode::object("h", "Holder"))
            .with_node(GraphNode::collection("c", "List"))
            .with_node(GraphNode::primitive("t", "String", "str:t"))
            .with_edge("h", EdgeLabel::field("items"), "c")
            .with_edge("h", EdgeLabel::field("tag"), "t");
        for (i, v) in values.iter().enumerate() {
            let id = format!("e{i}");
            raw = raw
                .with_node(GraphNode::primitive(&id, "int", *v))
                .with_edge("c", EdgeLabel::Index(i as u64), &id);
        }
        canonicalize(&raw).unwrap()
    }

    fn run(version: ProgramVersion, index: u32, vars: Vec<VariableGraph>) -> TestRunSnapshot {
        TestRunSnapshot {
            program_version: version,
            run_index: index,
            test_id: "T".into(),
            outcome: None,
            variables: vars,
        }
    }

    fn mask_of(vars: &[VariableGraph]) -> DeterminismMask {
        let runs: Vec<_> = (0..2)
            .map(|i| run(ProgramVersion::Original, i, vars.to_vec()))
            .collect();
        build_mask(&runs).unwrap()
    }

    #[test]
    fn identical_graphs_have_no_difference() {
        let g = list("v", &["int:1", "int:2"]);
        let mask = mask_of(std::slice::from_ref(&g));
        assert!(diff_graphs(&g, &g, mask.slice(&g.variable).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn size_change_halts_below_collection() {
        // 7 nodes: holder, tag, list, three elements... minus one in the mutant,
        // and the surviving elements changed too.
        let o = list("v", &["int:1", "int:2", "int:3"]);
        let m = list("v", &["int:9", "int:8"]);
        let mask = mask_of(std::slice::from_ref(&o));
        let d = diff_graphs(&o, &m, mask.slice(&o.variable).unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].node_id, "v.items");
        assert_eq!(d[0].kind, DifferenceKind::CollectionSize);
        assert_eq!((d[0].expected.as_str(), d[0].observed.as_str()), ("3", "2"));
        assert_eq!(d[0].depth, 2);
    }

    #[test]
    fn value_change_reported_at_leaf() {
        let o = list("v", &["int:1", "int:2"]);
        let m = list("v", &["int:1", "int:5"]);
        let mask = mask_of(std::slice::from_ref(&o));
        let d = diff_graphs(&o, &m, mask.slice(&o.variable).unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].node_id, "v.items[1]");
        assert_eq!(d[0].depth, 3);
        assert_eq!(d[0].expected, "int:2");
    }

    #[test]
    fn nullness_reported_at_shallowest_node() {
        let o = list("v", &["int:1"]);
        let m = canonicalize(
            &VariableGraph::raw(RootVariable::local("v"), "h")
                .with_node(GraphNode::object("h", "Holder"))
                .with_node(GraphNode::null("c", "List"))
                .with_node(GraphNode::primitive("t", "String", "str:t"))
                .with_edge("h", EdgeLabel::field("items"), "c")
                .with_edge("h", EdgeLabel::field("tag"), "t"),
        )
        .unwrap();
        let mask = mask_of(std::slice::from_ref(&o));
        let d = diff_graphs(&o, &m, mask.slice(&o.variable).unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DifferenceKind::Nullness);
        assert_eq!((d[0].expected.as_str(), d[0].observed.as_str()), ("collection:List", "null"));
    }

    #[test]
    fn masked_infection_is_ignored() {
        let a = list("v", &["int:1"]);
        let b = list("v", &["int:2"]);
        let runs = vec![
            run(ProgramVersion::Original, 0, vec![a.clone()]),
            run(ProgramVersion::Original, 1, vec![b.clone()]),
        ];
        let mask = build_mask(&runs).unwrap();
        let mutant = run(ProgramVersion::Mutant("m".into()), 0, vec![list("v", &["int:7"])]);
        assert!(diff_test_run(&runs[0], &mutant, &mask).unwrap().records.is_empty());
    }

    struct Counting(AtomicUsize);

    impl GraphComparator for Counting {
        fn compare(
            &self,
            o: &VariableGraph,
            m: &VariableGraph,
            mask: &VariableMask,
        ) -> Result<Vec<NodeDifference>, DiffError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            diff_graphs(o, m, mask)
        }
    }

    #[test]
    fn aliased_variables_compared_once() {
        let o = vec![list("a", &["int:1"]), list("b", &["int:1"])];
        let m = vec![list("a", &["int:4"]), list("b", &["int:4"])];
        let mask = mask_of(&o);
        let counter = Counting(AtomicUsize::new(0));
        let d = diff_test_run_with(
            &run(ProgramVersion::Original, 0, o),
            &run(ProgramVersion::Mutant("m".into()), 0, m),
            &mask,
            &counter,
        )
        .unwrap();
        assert_eq!(counter.0.load(Ordering::SeqCst), 1);
        let ids: Vec<_> = d.records.iter().map(|r| r.node_id.as_str()).collect();
        assert_eq!(ids, ["a.items[0]", "b.items[0]"]);
    }

    #[test]
    fn byte_identical_mutant_run_is_clean() {
        let o = vec![list("a", &["int:1"])];
        let mask = mask_of(&o);
        let mutant = run(ProgramVersion::Mutant("m".into()), 0, o.clone());
        let d = diff_test_run(&run(ProgramVersion::Original, 0, o), &mutant, &mask).unwrap();
        assert!(d.records.is_empty());
    }

    #[test]
    fn mutant_only_variable_is_skipped_with_notice() {
        let o = vec![list("a", &["int:1"])];
        let mask = mask_of(&o);
        let mutant = run(
            ProgramVersion::Mutant("m".into()),
            0,
            vec![list("a", &["int:1"]), list("z", &["int:1"])],
        );
        let d = diff_test_run(&run(ProgramVersion::Original, 0, o), &mutant, &mask).unwrap();
        assert!(d.records.is_empty());
        assert_eq!(d.notices.len(), 1);
    }

    #[test]
    fn type_change_is_flagged() {
        let o = list("v", &["int:1"]);
        let mut m = o.clone();
        m.nodes[0].type_name = "SubHolder".into();
        let mask = mask_of(std::slice::from_ref(&o));
        let d = diff_graphs(&o, &m, mask.slice(&o.variable).unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DifferenceKind::Type);
        assert!(d[0].type_name_only);
    }

    #[test]
    fn missing_snapshot_is_a_per_test_error() {
        let o = vec![list("a", &["int:1"])];
        let mut masks = MaskSet::default();
        masks.masks.insert("T".into(), mask_of(&o));
        let baselines = BTreeMap::from([("T".to_string(), run(ProgramVersion::Original, 0, o))]);
        let entry = MutantEntry {
            mutant_id: "m".into(),
            location: String::new(),
            operator: String::new(),
            status: MutantStatus::Survived,
            covering_test_ids: vec!["T".into(), "U".into()],
        };
        let d = diff_mutant(&entry, &BTreeMap::new(), &baselines, &masks).unwrap();
        assert_eq!(d.errors.len(), 2);
        let killed = MutantEntry {
            status: MutantStatus::Killed,
            ..entry
        };
        assert!(diff_mutant(&killed, &BTreeMap::new(), &baselines, &masks).is_err());
    }
}
