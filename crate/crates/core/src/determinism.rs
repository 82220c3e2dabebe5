//! Deterministic/nondeterministic location masks built from repeated runs
//! of the unmutated program.
//!
//! A location is deterministic when it exists in every run with the same
//! kind, type, and payload. Disagreement on shape (presence, kind, type,
//! collection size) poisons the whole subtree below the location; a
//! disagreement on a leaf value poisons only that leaf.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical_json;
use crate::snapshot::{
    path, GraphNode, ProgramVersion, RootVariable, TestRunSnapshot, VariableGraph,
};

pub const DEFAULT_RUNS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("at least two original runs are needed to build a mask, got {0}")]
    TooFewRuns(usize),
    #[error("runs mix tests {0:?} and {1:?}")]
    MismatchedTests(String, String),
    #[error("run {run_index} of {test_id:?} is not an original-program run")]
    NotOriginal { test_id: String, run_index: u32 },
    #[error("test {0:?} passes in some original runs and fails in others")]
    FlakyTest(String),
    #[error("no mask for variable {variable} of test {test_id:?}")]
    UnknownVariable { test_id: String, variable: String },
}

/// Type names excluded from comparison (e.g. threading or logging state).
///
/// A pattern matches a type name exactly, or as a prefix when it ends in `*`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeExclusions {
    pub patterns: Vec<String>,
}

impl TypeExclusions {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(patterns: I) -> Self {
        TypeExclusions {
            patterns: patterns.into_iter().map(Into::into).collect(),
        }
    }

    pub fn matches(&self, type_name: &str) -> bool {
        self.patterns.iter().any(|p| match p.strip_suffix('*') {
            Some(prefix) => type_name.starts_with(prefix),
            None => type_name == p,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Mask for one root variable of one test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableMask {
    pub variable: RootVariable,
    pub deterministic: BTreeSet<String>,
    pub nondeterministic: BTreeSet<String>,
    /// Digest of the root-relative deterministic set. Two aliased variables
    /// with equal fingerprints are masked identically.
    #[serde(with = "crate::snapshot::hex_u64")]
    pub fingerprint: u64,
}

impl VariableMask {
    pub fn is_deterministic(&self, node_id: &str) -> bool {
        self.deterministic.contains(node_id)
    }

    fn new(variable: RootVariable, deterministic: BTreeSet<String>, nondeterministic: BTreeSet<String>) -> Self {
        let mut buf = Vec::new();
        for id in &deterministic {
            buf.extend_from_slice(path::relative(id, &variable.name).as_bytes());
            buf.push(b'\n');
        }
        VariableMask {
            fingerprint: canonical_json::fnv1a64(&buf),
            variable,
            deterministic,
            nondeterministic,
        }
    }
}

/// Masks for every root variable observed in the original runs of one test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminismMask {
    pub test_id: String,
    pub n_runs_observed: u32,
    /// Sorted by variable.
    pub variables: Vec<VariableMask>,
}

impl DeterminismMask {
    pub fn variable(&self, variable: &RootVariable) -> Option<&VariableMask> {
        self.variables
            .binary_search_by(|m| m.variable.cmp(variable))
            .ok()
            .map(|i| &self.variables[i])
    }

    pub fn slice(&self, variable: &RootVariable) -> Result<&VariableMask, MaskError> {
        self.variable(variable).ok_or_else(|| MaskError::UnknownVariable {
            test_id: self.test_id.clone(),
            variable: variable.to_string(),
        })
    }
}

/// Masks for a whole corpus, keyed by test id. This is the `mask.json` cache.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskSet {
    pub masks: BTreeMap<String, DeterminismMask>,
}

impl MaskSet {
    pub fn get(&self, test_id: &str) -> Option<&DeterminismMask> {
        self.masks.get(test_id)
    }
}

pub fn build_mask(runs: &[TestRunSnapshot]) -> Result<DeterminismMask, MaskError> {
    build_mask_with(runs, &TypeExclusions::default())
}

pub fn build_mask_with(
    runs: &[TestRunSnapshot],
    exclusions: &TypeExclusions,
) -> Result<DeterminismMask, MaskError> {
    if runs.len() < 2 {
        return Err(MaskError::TooFewRuns(runs.len()));
    }
    let test_id = &runs[0].test_id;
    for run in runs {
        if &run.test_id != test_id {
            return Err(MaskError::MismatchedTests(test_id.clone(), run.test_id.clone()));
        }
        if run.program_version != ProgramVersion::Original {
            return Err(MaskError::NotOriginal {
                test_id: test_id.clone(),
                run_index: run.run_index,
            });
        }
    }
    if runs.iter().any(|r| r.outcome != runs[0].outcome) {
        return Err(MaskError::FlakyTest(test_id.clone()));
    }

    let variables: BTreeSet<&RootVariable> = runs
        .iter()
        .flat_map(|r| r.variables.iter().map(|g| &g.variable))
        .collect();

    let masks = variables
        .into_iter()
        .map(|variable| {
            let graphs: Vec<Option<&VariableGraph>> =
                runs.iter().map(|r| r.variable(variable)).collect();
            mask_variable(variable, &graphs, exclusions)
        })
        .collect();

    Ok(DeterminismMask {
        test_id: test_id.clone(),
        n_runs_observed: runs.len() as u32,
        variables: masks,
    })
}

fn mask_variable(
    variable: &RootVariable,
    graphs: &[Option<&VariableGraph>],
    exclusions: &TypeExclusions,
) -> VariableMask {
    let indexed: Vec<HashMap<&str, &GraphNode>> = graphs
        .iter()
        .map(|g| {
            g.map(|g| g.nodes.iter().map(|n| (n.node_id.as_str(), n)).collect())
                .unwrap_or_default()
        })
        .collect();
    let all_ids: BTreeSet<&str> = indexed.iter().flat_map(|m| m.keys().copied()).collect();

    if graphs.iter().any(Option::is_none) {
        return VariableMask::new(
            variable.clone(),
            BTreeSet::new(),
            all_ids.into_iter().map(str::to_string).collect(),
        );
    }

    let mut shape_roots: BTreeSet<&str> = BTreeSet::new();
    let mut leaf_varied: BTreeSet<&str> = BTreeSet::new();
    for &id in &all_ids {
        let seen: Vec<&GraphNode> = indexed.iter().filter_map(|m| m.get(id).copied()).collect();
        if seen.iter().any(|n| exclusions.matches(&n.type_name)) {
            shape_roots.insert(id);
            continue;
        }
        if seen.len() != indexed.len() {
            shape_roots.insert(id);
            continue;
        }
        let first = seen[0];
        for n in &seen[1..] {
            if n.kind != first.kind || n.type_name != first.type_name || n.size != first.size {
                shape_roots.insert(id);
                break;
            }
            if n.value != first.value || n.ref_target != first.ref_target {
                leaf_varied.insert(id);
            }
        }
    }

    let mut deterministic = BTreeSet::new();
    let mut nondeterministic = BTreeSet::new();
    for &id in &all_ids {
        let poisoned = leaf_varied.contains(id)
            || shape_roots.contains(id)
            || ancestors(id).any(|a| shape_roots.contains(a));
        if poisoned {
            nondeterministic.insert(id.to_string());
        } else {
            deterministic.insert(id.to_string());
        }
    }
    VariableMask::new(variable.clone(), deterministic, nondeterministic)
}

/// Strict ancestors of an access path, nearest first.
fn ancestors(id: &str) -> impl Iterator<Item = &str> {
    id.char_indices()
        .rev()
        .filter(|&(_, c)| c == '.' || c == '[')
        .map(move |(i, _)| &id[..i])
}

/// Whether `node_id` may be asserted on. Locations never observed in the
/// original runs are not assertable.
pub fn is_deterministic(
    mask: &DeterminismMask,
    test_id: &str,
    variable: &RootVariable,
    node_id: &str,
) -> Result<bool, MaskError> {
    if mask.test_id != test_id {
        return Err(MaskError::UnknownVariable {
            test_id: test_id.to_string(),
            variable: variable.to_string(),
        });
    }
    Ok(mask.slice(variable)?.is_deterministic(node_id))
}
