//! Assertion candidates and the candidate-to-mutant kill matrix.
//!
//! Records at the same (test, variable, location) with the same expected
//! value merge into one candidate: an equality assertion on the original
//! value fails for every mutant that moved it, whatever each one observed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical_json;
use crate::diff::{DifferenceKind, InfectionRecord};
use crate::ratio::{killable_label, Fraction};
use crate::snapshot::{MutantManifest, RootVariable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(
        "contradictory expected values {first:?} and {second:?} for {test_id}/{variable}/{node_id}; \
         the location should have been masked as nondeterministic"
    )]
    ContradictoryExpected {
        test_id: String,
        variable: String,
        node_id: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssertionKind {
    ValueEquality,
    NullCheck,
    TypeCheck,
    SizeCheck,
    /// Presence of the expected fields or of the variable itself.
    StructureCheck,
}

impl From<DifferenceKind> for AssertionKind {
    fn from(kind: DifferenceKind) -> Self {
        match kind {
            DifferenceKind::Value => AssertionKind::ValueEquality,
            DifferenceKind::Nullness => AssertionKind::NullCheck,
            DifferenceKind::Type => AssertionKind::TypeCheck,
            DifferenceKind::CollectionSize => AssertionKind::SizeCheck,
            DifferenceKind::MissingStructure => AssertionKind::StructureCheck,
        }
    }
}

impl fmt::Display for AssertionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssertionKind::ValueEquality => "value-equality",
            AssertionKind::NullCheck => "null-check",
            AssertionKind::TypeCheck => "type-check",
            AssertionKind::SizeCheck => "size-check",
            AssertionKind::StructureCheck => "structure-check",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionCandidate {
    pub candidate_id: String,
    pub test_id: String,
    pub variable: RootVariable,
    pub node_id: String,
    pub depth: u32,
    pub assertion_kind: AssertionKind,
    pub expected: String,
    pub kills: BTreeSet<String>,
    /// Polluted value seen under each killed mutant.
    pub observed: BTreeMap<String, String>,
}

type CandidateKey<'a> = (&'a str, &'a RootVariable, &'a str, AssertionKind, &'a str);

impl AssertionCandidate {
    pub fn key(&self) -> CandidateKey<'_> {
        (
            &self.test_id,
            &self.variable,
            &self.node_id,
            self.assertion_kind,
            &self.expected,
        )
    }

    /// (test, variable) pair: the unit counted by the variable metrics.
    pub fn variable_key(&self) -> (&str, &RootVariable) {
        (&self.test_id, &self.variable)
    }
}

/// Stable id derived from the grouping key.
pub fn candidate_id(
    test_id: &str,
    variable: &RootVariable,
    node_id: &str,
    kind: AssertionKind,
    expected: &str,
) -> String {
    canonical_json::digest_hex(&canonical_json::to_vec(&(
        test_id, variable, node_id, kind, expected,
    )))
}

pub fn build_candidates(records: &[InfectionRecord]) -> Result<Vec<AssertionCandidate>, MatrixError> {
    let mut expected_at: BTreeMap<(&str, &RootVariable, &str, AssertionKind), &str> = BTreeMap::new();
    let mut groups: BTreeMap<CandidateKey<'_>, AssertionCandidate> = BTreeMap::new();
    for r in records {
        let kind = AssertionKind::from(r.difference_kind);
        let slot = (r.test_id.as_str(), &r.variable, r.node_id.as_str(), kind);
        match expected_at.get(&slot) {
            Some(&prev) if prev != r.expected => {
                return Err(MatrixError::ContradictoryExpected {
                    test_id: r.test_id.clone(),
                    variable: r.variable.to_string(),
                    node_id: r.node_id.clone(),
                    first: prev.to_string(),
                    second: r.expected.clone(),
                })
            }
            Some(_) => {}
            None => {
                expected_at.insert(slot, &r.expected);
            }
        }
        let key = (
            r.test_id.as_str(),
            &r.variable,
            r.node_id.as_str(),
            kind,
            r.expected.as_str(),
        );
        let c = groups.entry(key).or_insert_with(|| AssertionCandidate {
            candidate_id: candidate_id(&r.test_id, &r.variable, &r.node_id, kind, &r.expected),
            test_id: r.test_id.clone(),
            variable: r.variable.clone(),
            node_id: r.node_id.clone(),
            depth: r.depth,
            assertion_kind: kind,
            expected: r.expected.clone(),
            kills: BTreeSet::new(),
            observed: BTreeMap::new(),
        });
        c.kills.insert(r.mutant_id.clone());
        c.observed.insert(r.mutant_id.clone(), r.observed.clone());
    }
    Ok(groups.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableGroup {
    pub test_id: String,
    pub variable: RootVariable,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestGroup {
    pub test_id: String,
    pub candidates: Vec<String>,
}

/// Candidates, their groupings by (test, variable) and by test, and the
/// set of mutants at least one candidate kills.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateMatrix {
    pub candidates: Vec<AssertionCandidate>,
    pub by_variable: Vec<VariableGroup>,
    pub by_test: Vec<TestGroup>,
    pub killable_mutants: BTreeSet<String>,
}

impl CandidateMatrix {
    pub fn candidate(&self, id: &str) -> Option<&AssertionCandidate> {
        self.candidates.iter().find(|c| c.candidate_id == id)
    }

    pub fn mean_depth(&self) -> Option<Fraction> {
        let total: u64 = self.candidates.iter().map(|c| c.depth as u64).sum();
        (!self.candidates.is_empty())
            .then(|| Fraction::new(total, self.candidates.len() as u64))
    }
}

pub fn build_matrix(mut candidates: Vec<AssertionCandidate>) -> CandidateMatrix {
    candidates.retain(|c| !c.kills.is_empty());
    candidates.sort_by(|a, b| a.key().cmp(&b.key()));
    let mut by_variable: BTreeMap<(&str, &RootVariable), Vec<String>> = BTreeMap::new();
    let mut by_test: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut killable = BTreeSet::new();
    for c in &candidates {
        by_variable
            .entry(c.variable_key())
            .or_default()
            .push(c.candidate_id.clone());
        by_test
            .entry(&c.test_id)
            .or_default()
            .push(c.candidate_id.clone());
        killable.extend(c.kills.iter().cloned());
    }
    let by_variable = by_variable
        .into_iter()
        .map(|((t, v), ids)| VariableGroup {
            test_id: t.to_string(),
            variable: v.clone(),
            candidates: ids,
        })
        .collect();
    let by_test = by_test
        .into_iter()
        .map(|(t, ids)| TestGroup {
            test_id: t.to_string(),
            candidates: ids,
        })
        .collect();
    CandidateMatrix {
        candidates,
        by_variable,
        by_test,
        killable_mutants: killable,
    }
}

/// Killability summary in the shape of a per-project opportunities row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillableStats {
    pub killable: u64,
    pub surviving: u64,
    pub ratio: Fraction,
    /// Mean over killable mutants of the distinct candidates killing it.
    pub mean_ways_assert: Fraction,
    /// Same, counting distinct (test, variable) pairs.
    pub mean_ways_var: Fraction,
    /// Same, counting variables by identity alone, across tests.
    pub mean_ways_var_global: Fraction,
    pub mean_ways_test: Fraction,
    pub total_assert: u64,
    pub total_var: u64,
    pub total_var_global: u64,
    pub total_test: u64,
    pub mean_depth: Fraction,
    /// False when there are no killable mutants and the means are reported as 0.
    pub averages_defined: bool,
}

impl KillableStats {
    pub fn killable_label(&self) -> String {
        killable_label(self.killable, self.surviving)
    }
}

/// Per killable mutant: killing candidates, (test, variable) pairs,
/// variables across tests, tests.
type Ways<'a> = (u64, BTreeSet<(&'a str, &'a RootVariable)>, BTreeSet<&'a RootVariable>, BTreeSet<&'a str>);

pub fn killable_stats(matrix: &CandidateMatrix, manifest: &MutantManifest) -> KillableStats {
    let surviving = manifest.surviving().count() as u64;
    let killable = matrix.killable_mutants.len() as u64;

    let mut per_mutant: BTreeMap<&str, Ways<'_>> = BTreeMap::new();
    for c in &matrix.candidates {
        for m in &c.kills {
            let e = per_mutant.entry(m).or_default();
            e.0 += 1;
            e.1.insert(c.variable_key());
            e.2.insert(&c.variable);
            e.3.insert(&c.test_id);
        }
    }
    let mean = |f: &dyn Fn(&Ways<'_>) -> u64| {
        if killable == 0 {
            Fraction::zero()
        } else {
            Fraction::new(per_mutant.values().map(f).sum(), killable)
        }
    };

    let vars: BTreeSet<_> = matrix.candidates.iter().map(|c| c.variable_key()).collect();
    let vars_global: BTreeSet<_> = matrix.candidates.iter().map(|c| &c.variable).collect();
    let tests: BTreeSet<_> = matrix.candidates.iter().map(|c| &c.test_id).collect();

    KillableStats {
        killable,
        surviving,
        ratio: if surviving == 0 {
            Fraction::zero()
        } else {
            Fraction::new(killable, surviving)
        },
        mean_ways_assert: mean(&|e| e.0),
        mean_ways_var: mean(&|e| e.1.len() as u64),
        mean_ways_var_global: mean(&|e| e.2.len() as u64),
        mean_ways_test: mean(&|e| e.3.len() as u64),
        total_assert: matrix.candidates.len() as u64,
        total_var: vars.len() as u64,
        total_var_global: vars_global.len() as u64,
        total_test: tests.len() as u64,
        mean_depth: matrix.mean_depth().unwrap_or_else(Fraction::zero),
        averages_defined: killable > 0,
    }
}
