//! Synthetic corpora with planted ground truth, and an exact set-cover
//! oracle for judging the greedy strategies.
//!
//! A [`ScenarioPlan`] is an explicit heap model: per test, an arena of
//! cells (objects, collections, primitives, nulls) and the variables that
//! point into it. Sharing is expressed through the arena, so a second
//! variable on the same root cell is a full alias and an object field
//! owning another variable's root is a nested alias. Mutants carry
//! plantings: value changes, nulled references, or a collection losing its
//! last element.
//!
//! [`generate`] turns a plan into snapshots plus a [`Truth`] computed from
//! the plan alone, by walking each variable's view of the arena. The
//! pipeline under test never sees the truth.

pub mod fixtures;
pub mod oracle;
mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical_json;
use crate::corpus::Corpus;
use crate::diff::{sort_records, DifferenceKind, InfectionRecord};
use crate::matrix::AssertionKind;
use crate::report::{AssertionId, AssertionInventory, KillRecord};
use crate::snapshot::{
    self, canonicalize, path, primitive, EdgeLabel, GraphNode, MutantEntry, MutantManifest,
    MutantStatus, ProgramVersion, RootVariable, TestOutcome, TestRunSnapshot, VariableGraph,
};

pub use oracle::{exact_min_cover, Dimension, OracleError};
pub use random::{plan_scenario, ScenarioSpec};

pub type CellId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    /// The field owns the target; it appears under this path.
    Owned(CellId),
    /// A pointer back to an owning ancestor: a cycle.
    Back(CellId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Object { type_name: String, fields: Vec<(String, Link)> },
    /// With `varying_size`, odd-numbered original runs carry one extra
    /// element and mutant runs two.
    Collection { type_name: String, elements: Vec<CellId>, varying_size: bool },
    /// With `varying`, the value differs in every run.
    Prim { type_name: String, value: String, varying: bool },
    Null { type_name: String },
}

impl Cell {
    pub fn prim(type_name: &str, value: String) -> Self {
        Cell::Prim { type_name: type_name.into(), value, varying: false }
    }

    pub fn type_name(&self) -> &str {
        match self {
            Cell::Object { type_name, .. }
            | Cell::Collection { type_name, .. }
            | Cell::Prim { type_name, .. }
            | Cell::Null { type_name } => type_name,
        }
    }

    fn varies(&self) -> bool {
        matches!(
            self,
            Cell::Prim { varying: true, .. } | Cell::Collection { varying_size: true, .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Presence {
    Always,
    /// Captured only in even-numbered runs, so never assertable.
    EvenRuns,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarPlan {
    pub variable: RootVariable,
    pub root: CellId,
    pub presence: Presence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPlan {
    pub test_id: String,
    pub cells: Vec<Cell>,
    pub variables: Vec<VarPlan>,
    /// Source lines of the test's existing assertions.
    pub assertion_lines: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Change {
    SetValue(String),
    SetNull,
    /// Drop the collection's last element.
    Shrink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Planting {
    pub test_id: String,
    pub cell: CellId,
    pub change: Change,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantPlan {
    pub mutant_id: String,
    pub location: String,
    pub operator: String,
    pub status: MutantStatus,
    pub covering_test_ids: Vec<String>,
    pub plantings: Vec<Planting>,
    /// Attribution for killed mutants.
    pub kills: Vec<KillRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioPlan {
    pub n_runs: u32,
    pub tests: Vec<TestPlan>,
    pub mutants: Vec<MutantPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid scenario parameter: {0}")]
    Parameter(String),
    #[error("test {test:?}: {message}")]
    Heap { test: String, message: String },
    #[error("mutant {mutant:?}: {message}")]
    Mutant { mutant: String, message: String },
    #[error(
        "mutant {mutant:?} plants at cell {inner} inside planted cell {outer} of test {test:?}; \
         the outer infection would hide it"
    )]
    NestedPlanting { mutant: String, test: String, outer: CellId, inner: CellId },
}

/// A planted candidate as the pipeline should recover it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruthCandidate {
    pub test_id: String,
    pub variable: RootVariable,
    pub node_id: String,
    pub assertion_kind: AssertionKind,
    pub expected: String,
    pub depth: u32,
    pub kills: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub surviving: BTreeSet<String>,
    pub killable: BTreeSet<String>,
    /// Sorted like the diff stage output.
    pub records: Vec<InfectionRecord>,
    pub candidates: Vec<TruthCandidate>,
    /// Plantings hidden by nondeterminism, which must yield no record.
    pub masked_plantings: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub corpus: Corpus,
    pub truth: Truth,
}

pub const TRUTH: &str = "truth.json";

pub fn write_truth(dir: &Path, truth: &Truth) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(TRUTH), canonical_json::to_vec(truth))
}

/// One cell as seen from one variable.
#[derive(Debug, Clone)]
struct Seen {
    path: String,
    depth: u32,
    masked: bool,
}

/// Walks a variable's owned tree. Fails if a cell is owned twice or a back
/// link does not point at an owning ancestor.
fn view(test: &TestPlan, var: &VarPlan) -> Result<BTreeMap<CellId, Seen>, SpecError> {
    let err = |message: String| SpecError::Heap { test: test.test_id.clone(), message };
    let mut seen: BTreeMap<CellId, Seen> = BTreeMap::new();
    // (cell, path, depth, masked, ancestors including self)
    let mut stack = vec![(var.root, var.variable.name.clone(), 1u32, var.presence != Presence::Always, Vec::new())];
    while let Some((cell_id, at, depth, parent_masked, mut ancestors)) = stack.pop() {
        let cell = test
            .cells
            .get(cell_id)
            .ok_or_else(|| err(format!("cell {cell_id} out of range")))?;
        if seen.contains_key(&cell_id) {
            return Err(err(format!("cell {cell_id} is owned twice in the view of {}", var.variable)));
        }
        let masked = parent_masked || cell.varies();
        seen.insert(cell_id, Seen { path: at.clone(), depth, masked });
        ancestors.push(cell_id);
        match cell {
            Cell::Object { fields, .. } => {
                for (name, link) in fields {
                    if !path::is_valid_segment(name) {
                        return Err(err(format!("field name {name:?} is not a path segment")));
                    }
                    match link {
                        Link::Owned(c) => stack.push((*c, format!("{at}.{name}"), depth + 1, masked, ancestors.clone())),
                        Link::Back(c) if ancestors.contains(c) => {}
                        Link::Back(c) => {
                            return Err(err(format!("back link from cell {cell_id} to non-ancestor {c}")))
                        }
                    }
                }
            }
            Cell::Collection { elements, .. } => {
                for (i, c) in elements.iter().enumerate() {
                    stack.push((*c, format!("{at}[{i}]"), depth + 1, masked, ancestors.clone()));
                }
            }
            Cell::Prim { .. } | Cell::Null { .. } => {}
        }
    }
    Ok(seen)
}

/// Cells owned (transitively) below `cell`, excluding itself.
fn owned_below(test: &TestPlan, cell: CellId) -> BTreeSet<CellId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![cell];
    while let Some(c) = stack.pop() {
        let kids: Vec<CellId> = match test.cells.get(c) {
            Some(Cell::Object { fields, .. }) => fields
                .iter()
                .filter_map(|(_, l)| match l {
                    Link::Owned(k) => Some(*k),
                    Link::Back(_) => None,
                })
                .collect(),
            Some(Cell::Collection { elements, .. }) => elements.clone(),
            _ => Vec::new(),
        };
        for k in kids {
            if out.insert(k) {
                stack.push(k);
            }
        }
    }
    out
}

/// Per test, per variable: every cell the variable's walk reaches.
type Reach<'a> = BTreeMap<&'a str, Vec<BTreeMap<CellId, Seen>>>;

fn check_plan(plan: &ScenarioPlan) -> Result<Reach<'_>, SpecError> {
    if plan.n_runs < 2 {
        return Err(SpecError::Parameter(format!("n_runs must be at least 2, got {}", plan.n_runs)));
    }
    let mut views = BTreeMap::new();
    for test in &plan.tests {
        let herr = |message: String| SpecError::Heap { test: test.test_id.clone(), message };
        if !snapshot::is_file_safe(&test.test_id) {
            return Err(herr("test id cannot be used as a file name".into()));
        }
        if views.contains_key(test.test_id.as_str()) {
            return Err(herr("duplicate test id".into()));
        }
        let roots: BTreeSet<&RootVariable> = test.variables.iter().map(|v| &v.variable).collect();
        if roots.len() != test.variables.len() {
            return Err(herr("duplicate root variable".into()));
        }
        let mut per_var = Vec::new();
        for v in &test.variables {
            if !path::is_valid_segment(&v.variable.name) {
                return Err(herr(format!("variable name {:?} is not a path segment", v.variable.name)));
            }
            per_var.push(view(test, v)?);
        }
        views.insert(test.test_id.as_str(), per_var);
    }

    let tests: BTreeMap<&str, &TestPlan> = plan.tests.iter().map(|t| (t.test_id.as_str(), t)).collect();
    let mut ids = BTreeSet::new();
    for m in &plan.mutants {
        let merr = |message: String| SpecError::Mutant { mutant: m.mutant_id.clone(), message };
        if !snapshot::is_file_safe(&m.mutant_id) || !ids.insert(m.mutant_id.as_str()) {
            return Err(merr("duplicate or unusable mutant id".into()));
        }
        for t in &m.covering_test_ids {
            if !tests.contains_key(t.as_str()) {
                return Err(merr(format!("covering test {t:?} is not in the plan")));
            }
        }
        if m.status == MutantStatus::Killed && !m.plantings.is_empty() {
            return Err(merr("killed mutants are not analyzed; plantings would be ignored".into()));
        }
        if m.status == MutantStatus::Survived && !m.kills.is_empty() {
            return Err(merr("a surviving mutant has kill records".into()));
        }
        for k in &m.kills {
            if k.mutant_id != m.mutant_id || !m.covering_test_ids.contains(&k.test_id) {
                return Err(merr(format!("kill record for test {:?} does not match", k.test_id)));
            }
        }
        let mut by_test: BTreeMap<&str, Vec<CellId>> = BTreeMap::new();
        for p in &m.plantings {
            let test = tests
                .get(p.test_id.as_str())
                .filter(|_| m.covering_test_ids.contains(&p.test_id))
                .ok_or_else(|| merr(format!("planting in test {:?}, which does not cover it", p.test_id)))?;
            let cell = test
                .cells
                .get(p.cell)
                .ok_or_else(|| merr(format!("planting at missing cell {}", p.cell)))?;
            let ok = match (&p.change, cell) {
                (Change::SetValue(v), Cell::Prim { value, .. }) => v != value,
                (Change::SetNull, Cell::Object { .. } | Cell::Collection { .. }) => true,
                (Change::Shrink, Cell::Collection { elements, .. }) => !elements.is_empty(),
                _ => false,
            };
            if !ok {
                return Err(merr(format!("change {:?} does not apply to cell {}", p.change, p.cell)));
            }
            if !views[p.test_id.as_str()].iter().any(|v| v.contains_key(&p.cell)) {
                return Err(merr(format!("cell {} is not reachable from any variable", p.cell)));
            }
            by_test.entry(&p.test_id).or_default().push(p.cell);
        }
        for (test_id, cells) in by_test {
            let test = tests[test_id];
            for (i, &a) in cells.iter().enumerate() {
                let below = owned_below(test, a);
                for (j, &b) in cells.iter().enumerate() {
                    if i != j && (a == b || below.contains(&b)) {
                        return Err(SpecError::NestedPlanting {
                            mutant: m.mutant_id.clone(),
                            test: test_id.to_string(),
                            outer: a,
                            inner: b,
                        });
                    }
                }
            }
        }
    }
    Ok(views)
}

/// What a run does to the heap.
enum Mode<'a> {
    Original(u32),
    Mutant(BTreeMap<CellId, &'a Change>),
}

const MUTANT_RUN_MARK: u32 = 999;

fn varied_value(value: &str, run: u32) -> String {
    match primitive::split(value) {
        Some(("int", v)) => match v.parse::<i64>() {
            Ok(n) => primitive::int(n.wrapping_add((run as i64 + 1) * 1_000_003)),
            Err(_) => format!("{value}@{run}"),
        },
        _ => format!("{value}@{run}"),
    }
}

fn raw_graph(test: &TestPlan, var: &VarPlan, mode: &Mode<'_>) -> VariableGraph {
    let id = |c: CellId| format!("h{c}");
    let mut g = VariableGraph::raw(var.variable.clone(), id(var.root));
    let mut stack = vec![var.root];
    while let Some(c) = stack.pop() {
        let here = id(c);
        let change = match mode {
            Mode::Mutant(changes) => changes.get(&c).copied(),
            Mode::Original(_) => None,
        };
        let cell = &test.cells[c];
        if matches!(change, Some(Change::SetNull)) {
            g = g.with_node(GraphNode::null(here, cell.type_name()));
            continue;
        }
        match cell {
            Cell::Object { type_name, fields } => {
                g = g.with_node(GraphNode::object(here.clone(), type_name.clone()));
                for (name, link) in fields {
                    let target = match link {
                        Link::Owned(k) => {
                            stack.push(*k);
                            *k
                        }
                        Link::Back(k) => *k,
                    };
                    g = g.with_edge(&here, EdgeLabel::field(name.clone()), &id(target));
                }
            }
            Cell::Collection { type_name, elements, varying_size } => {
                g = g.with_node(GraphNode::collection(here.clone(), type_name.clone()));
                let mut kept = elements.len();
                if matches!(change, Some(Change::Shrink)) {
                    kept -= 1;
                }
                for (i, k) in elements[..kept].iter().enumerate() {
                    stack.push(*k);
                    g = g.with_edge(&here, EdgeLabel::Index(i as u64), &id(*k));
                }
                let extra = match (varying_size, mode) {
                    (false, _) => 0,
                    (true, Mode::Original(run)) => (*run % 2) as usize,
                    (true, Mode::Mutant(_)) => 2,
                };
                for e in 0..extra {
                    let x = format!("{here}x{e}");
                    g = g.with_node(GraphNode::primitive(x.clone(), "int", primitive::int(e as i64)));
                    g = g.with_edge(&here, EdgeLabel::Index((kept + e) as u64), &x);
                }
            }
            Cell::Prim { type_name, value, varying } => {
                let value = match (change, varying, mode) {
                    (Some(Change::SetValue(v)), _, _) => v.clone(),
                    (_, true, Mode::Original(run)) => varied_value(value, *run),
                    (_, true, Mode::Mutant(_)) => varied_value(value, MUTANT_RUN_MARK),
                    _ => value.clone(),
                };
                g = g.with_node(GraphNode::primitive(here, type_name.clone(), value));
            }
            Cell::Null { type_name } => g = g.with_node(GraphNode::null(here, type_name.clone())),
        }
    }
    g
}

fn materialize(test: &TestPlan, version: ProgramVersion, run: u32, mode: &Mode<'_>) -> TestRunSnapshot {
    let variables = test
        .variables
        .iter()
        .filter(|v| v.presence == Presence::Always || run.is_multiple_of(2))
        .map(|v| canonicalize(&raw_graph(test, v, mode)).expect("checked plans canonicalize"))
        .collect();
    TestRunSnapshot {
        program_version: version,
        run_index: run,
        test_id: test.test_id.clone(),
        outcome: Some(TestOutcome::Pass),
        variables,
    }
}

fn expected_record(cell: &Cell, change: &Change) -> (DifferenceKind, String, String) {
    match (change, cell) {
        (Change::SetValue(v), Cell::Prim { value, .. }) => (DifferenceKind::Value, value.clone(), v.clone()),
        (Change::SetNull, Cell::Object { type_name, .. }) => {
            (DifferenceKind::Nullness, format!("object:{type_name}"), "null".into())
        }
        (Change::SetNull, Cell::Collection { type_name, .. }) => {
            (DifferenceKind::Nullness, format!("collection:{type_name}"), "null".into())
        }
        (Change::Shrink, Cell::Collection { elements, .. }) => (
            DifferenceKind::CollectionSize,
            elements.len().to_string(),
            (elements.len() - 1).to_string(),
        ),
        _ => unreachable!("checked by check_plan"),
    }
}

/// Checks the plan, renders every snapshot, and derives the ground truth.
pub fn generate(plan: &ScenarioPlan) -> Result<GeneratedCorpus, SpecError> {
    let views = check_plan(plan)?;
    let tests: BTreeMap<&str, &TestPlan> = plan.tests.iter().map(|t| (t.test_id.as_str(), t)).collect();

    let mut originals = BTreeMap::new();
    for test in &plan.tests {
        let runs = (0..plan.n_runs)
            .map(|r| materialize(test, ProgramVersion::Original, r, &Mode::Original(r)))
            .collect();
        originals.insert(test.test_id.clone(), runs);
    }

    let mut truth = Truth::default();
    let mut mutant_runs = BTreeMap::new();
    let mut kills = Vec::new();
    for m in &plan.mutants {
        kills.extend(m.kills.iter().cloned());
        if m.status != MutantStatus::Survived {
            continue;
        }
        truth.surviving.insert(m.mutant_id.clone());
        let mut runs = BTreeMap::new();
        for t in &m.covering_test_ids {
            let test = tests[t.as_str()];
            let changes = m
                .plantings
                .iter()
                .filter(|p| &p.test_id == t)
                .map(|p| (p.cell, &p.change))
                .collect();
            let version = ProgramVersion::Mutant(m.mutant_id.clone());
            runs.insert(t.clone(), materialize(test, version, 0, &Mode::Mutant(changes)));
        }
        mutant_runs.insert(m.mutant_id.clone(), runs);

        for p in &m.plantings {
            let test = tests[p.test_id.as_str()];
            let (kind, expected, observed) = expected_record(&test.cells[p.cell], &p.change);
            let mut visible = false;
            for (var, seen) in test.variables.iter().zip(&views[p.test_id.as_str()]) {
                let Some(s) = seen.get(&p.cell).filter(|s| !s.masked) else { continue };
                visible = true;
                truth.records.push(InfectionRecord {
                    mutant_id: m.mutant_id.clone(),
                    test_id: p.test_id.clone(),
                    variable: var.variable.clone(),
                    node_id: s.path.clone(),
                    depth: s.depth,
                    difference_kind: kind,
                    expected: expected.clone(),
                    observed: observed.clone(),
                    type_name_only: false,
                });
            }
            if visible {
                truth.killable.insert(m.mutant_id.clone());
            } else {
                truth.masked_plantings += 1;
            }
        }
    }
    sort_records(&mut truth.records);

    type Key = (String, RootVariable, String, AssertionKind, String);
    let mut grouped: BTreeMap<Key, (u32, BTreeSet<String>)> = BTreeMap::new();
    for r in &truth.records {
        let key = (
            r.test_id.clone(),
            r.variable.clone(),
            r.node_id.clone(),
            AssertionKind::from(r.difference_kind),
            r.expected.clone(),
        );
        grouped.entry(key).or_insert((r.depth, BTreeSet::new())).1.insert(r.mutant_id.clone());
    }
    truth.candidates = grouped
        .into_iter()
        .map(|((test_id, variable, node_id, assertion_kind, expected), (depth, kills))| TruthCandidate {
            test_id,
            variable,
            node_id,
            assertion_kind,
            expected,
            depth,
            kills,
        })
        .collect();

    let mut tests_sorted: Vec<String> = plan.tests.iter().map(|t| t.test_id.clone()).collect();
    tests_sorted.sort();
    let manifest = MutantManifest {
        mutants: plan
            .mutants
            .iter()
            .map(|m| MutantEntry {
                mutant_id: m.mutant_id.clone(),
                location: m.location.clone(),
                operator: m.operator.clone(),
                status: m.status,
                covering_test_ids: m.covering_test_ids.clone(),
            })
            .collect(),
        tests: tests_sorted,
        n_runs: plan.n_runs,
    };
    let inventory = AssertionInventory(
        plan.tests
            .iter()
            .flat_map(|t| {
                t.assertion_lines.iter().map(|&line| AssertionId {
                    test_id: t.test_id.clone(),
                    line,
                    ordinal: 0,
                })
            })
            .collect(),
    );
    kills.sort();
    Ok(GeneratedCorpus {
        corpus: Corpus { manifest, originals, mutant_runs, kills, inventory: Some(inventory) },
        truth,
    })
}

/// Plans a random scenario from `spec` and generates it.
pub fn generate_corpus(spec: &ScenarioSpec) -> Result<GeneratedCorpus, SpecError> {
    generate(&plan_scenario(spec)?)
}
