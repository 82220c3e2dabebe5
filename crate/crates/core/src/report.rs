//! Human- and machine-readable outputs: killability and strategy tables,
//! per-mutant suggestion cards, and test/assertion kill-capability grids
//! built from ingested kill records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical_json;
use crate::matrix::{AssertionKind, CandidateMatrix, KillableStats};
use crate::ratio::{count_with_factor, Fraction};
use crate::select::{AggregatedSelection, Strategy};
use crate::snapshot::{MutantManifest, MutantStatus, RootVariable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    Assertion,
    NonAssertion,
}

/// An assertion site: test, source line and ordinal among assertions on
/// that line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssertionId {
    pub test_id: String,
    pub line: u32,
    pub ordinal: u32,
}

impl fmt::Display for AssertionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}#{}", self.test_id, self.line, self.ordinal)
    }
}

/// How a killed mutant was killed by one test.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KillRecord {
    pub mutant_id: String,
    pub test_id: String,
    pub failure_kind: FailureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertion_id: Option<AssertionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KillRecordError {
    #[error("line {line}: malformed record at byte {offset}: {message}")]
    Malformed { line: usize, offset: usize, message: String },
    #[error("line {line}: unknown mutant {mutant:?}")]
    UnknownMutant { line: usize, mutant: String },
    #[error("line {line}: mutant {mutant:?} is not killed in the manifest")]
    NotKilled { line: usize, mutant: String },
    #[error("line {line}: unknown test {test:?}")]
    UnknownTest { line: usize, test: String },
    #[error("line {line}: test {test:?} does not cover mutant {mutant:?}")]
    NotCovering { line: usize, mutant: String, test: String },
    #[error("line {line}: {message}")]
    AssertionId { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestedKills {
    pub records: Vec<KillRecord>,
    pub notices: Vec<String>,
}

/// Parses `kills.jsonl` text. Blank lines are ignored; line numbers start
/// at 1. Records come back sorted, with exact duplicates dropped and
/// reported as notices.
pub fn ingest_kill_records(text: &str, manifest: &MutantManifest) -> Result<IngestedKills, KillRecordError> {
    let mut seen = BTreeSet::new();
    let mut out = IngestedKills::default();
    let mut line_start = 0usize;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let line = i + 1;
        let start = line_start;
        line_start += raw.len();
        let body = raw.trim_end_matches(['\n', '\r']);
        if body.trim().is_empty() {
            continue;
        }
        let record: KillRecord = serde_json::from_str(body).map_err(|e| KillRecordError::Malformed {
            line,
            offset: start + e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        let mutant = manifest
            .mutant(&record.mutant_id)
            .ok_or_else(|| KillRecordError::UnknownMutant { line, mutant: record.mutant_id.clone() })?;
        if mutant.status != MutantStatus::Killed {
            return Err(KillRecordError::NotKilled { line, mutant: record.mutant_id.clone() });
        }
        if !manifest.has_test(&record.test_id) {
            return Err(KillRecordError::UnknownTest { line, test: record.test_id.clone() });
        }
        if !mutant.covering_test_ids.contains(&record.test_id) {
            return Err(KillRecordError::NotCovering {
                line,
                mutant: record.mutant_id.clone(),
                test: record.test_id.clone(),
            });
        }
        match (&record.failure_kind, &record.assertion_id) {
            (FailureKind::Assertion, None) => {
                return Err(KillRecordError::AssertionId {
                    line,
                    message: "assertion failure without assertion_id".into(),
                })
            }
            (FailureKind::NonAssertion, Some(_)) => {
                return Err(KillRecordError::AssertionId {
                    line,
                    message: "non-assertion failure with an assertion_id".into(),
                })
            }
            (FailureKind::Assertion, Some(a)) if a.test_id != record.test_id => {
                return Err(KillRecordError::AssertionId {
                    line,
                    message: format!("assertion {a} belongs to another test"),
                })
            }
            _ => {}
        }
        if seen.contains(&record) {
            out.notices.push(format!(
                "line {line}: duplicate record for mutant {:?} in test {:?} dropped",
                record.mutant_id, record.test_id
            ));
            continue;
        }
        seen.insert(record);
    }
    out.records = seen.into_iter().collect();
    Ok(out)
}

/// Canonical `kills.jsonl` text, one record per line.
pub fn render_kill_records(records: &[KillRecord]) -> String {
    let mut sorted: Vec<&KillRecord> = records.iter().collect();
    sorted.sort();
    sorted
        .into_iter()
        .map(|r| canonical_json::to_string(r) + "\n")
        .collect()
}

/// Every assertion of every test, including those that never fail.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssertionInventory(pub BTreeSet<AssertionId>);

impl AssertionInventory {
    /// Best effort when no inventory file exists: only assertions that
    /// killed something are known.
    pub fn from_records(records: &[KillRecord]) -> Self {
        AssertionInventory(records.iter().filter_map(|r| r.assertion_id.clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapabilityError {
    #[error("kill record for mutant {mutant:?} names assertion {assertion} missing from the inventory")]
    UnknownAssertion { mutant: String, assertion: AssertionId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionCapability {
    pub assertion_id: AssertionId,
    pub kills: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCapability {
    pub test_id: String,
    /// Distinct mutants this test kills, by any failure kind.
    pub kills: u64,
    pub assertion_count: u64,
    pub assertions: Vec<AssertionCapability>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityReport {
    pub tests: Vec<TestCapability>,
}

/// Per-test and per-assertion kill counts. Tests come from the inventory
/// and the records; assertions with zero kills stay in the report.
pub fn capability_report(
    records: &[KillRecord],
    inventory: &AssertionInventory,
) -> Result<CapabilityReport, CapabilityError> {
    let mut by_test: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut by_assertion: BTreeMap<&AssertionId, BTreeSet<&str>> =
        inventory.0.iter().map(|a| (a, BTreeSet::new())).collect();
    for a in &inventory.0 {
        by_test.entry(&a.test_id).or_default();
    }
    for r in records {
        by_test.entry(&r.test_id).or_default().insert(&r.mutant_id);
        if let Some(a) = &r.assertion_id {
            by_assertion
                .get_mut(a)
                .ok_or_else(|| CapabilityError::UnknownAssertion {
                    mutant: r.mutant_id.clone(),
                    assertion: a.clone(),
                })?
                .insert(&r.mutant_id);
        }
    }
    let tests = by_test
        .into_iter()
        .map(|(test_id, killed)| {
            let assertions: Vec<AssertionCapability> = by_assertion
                .iter()
                .filter(|(a, _)| a.test_id == test_id)
                .map(|(a, k)| AssertionCapability {
                    assertion_id: (*a).clone(),
                    kills: k.len() as u64,
                })
                .collect();
            TestCapability {
                test_id: test_id.to_string(),
                kills: killed.len() as u64,
                assertion_count: assertions.len() as u64,
                assertions,
            }
        })
        .collect();
    Ok(CapabilityReport { tests })
}

impl CapabilityReport {
    /// One row per test: its kill count, assertion count, then one cell per
    /// assertion in source order. Short rows are padded with empty cells.
    pub fn grid_csv(&self) -> String {
        let width = self.tests.iter().map(|t| t.assertions.len()).max().unwrap_or(0);
        let mut out = String::from("test_id,test_kills,assertion_count");
        for i in 0..width {
            let _ = write!(out, ",a{i}");
        }
        out.push('\n');
        for t in &self.tests {
            let _ = write!(out, "{},{},{}", csv_field(&t.test_id), t.kills, t.assertion_count);
            for i in 0..width {
                out.push(',');
                if let Some(a) = t.assertions.get(i) {
                    let _ = write!(out, "{}", a.kills);
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One actionable assertion for one killable mutant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub mutant_id: String,
    pub candidate_id: String,
    pub test_id: String,
    pub variable: RootVariable,
    pub node_id: String,
    pub access_path: String,
    pub assertion_kind: AssertionKind,
    pub expected: String,
    pub observed: String,
    pub also_kills: Vec<String>,
    pub text: String,
}

/// The access path below the root variable: `var2.f4.f3` gives `.f4.f3`.
pub fn access_path(node_id: &str, variable: &RootVariable) -> String {
    node_id.strip_prefix(variable.name.as_str()).unwrap_or(node_id).to_string()
}

/// One card per killable mutant. The card uses the candidate that covered
/// the mutant in the first run of `selection`, falling back to the
/// shallowest candidate killing it (ties by candidate order).
pub fn suggestions(matrix: &CandidateMatrix, selection: Option<&AggregatedSelection>) -> Vec<Suggestion> {
    let mut chosen: BTreeMap<&str, &str> = BTreeMap::new();
    if let Some(run) = selection.and_then(|s| s.runs.first()) {
        for step in &run.chosen {
            for m in &step.new_kills {
                chosen.insert(m, &step.candidate_id);
            }
        }
    }
    matrix
        .killable_mutants
        .iter()
        .filter_map(|m| {
            let cand = chosen
                .get(m.as_str())
                .and_then(|id| matrix.candidate(id))
                .or_else(|| {
                    matrix
                        .candidates
                        .iter()
                        .filter(|c| c.kills.contains(m))
                        .min_by_key(|c| c.depth)
                })?;
            let observed = cand.observed.get(m).cloned().unwrap_or_default();
            let also_kills: Vec<String> = cand.kills.iter().filter(|k| *k != m).cloned().collect();
            let path = access_path(&cand.node_id, &cand.variable);
            let also = if also_kills.is_empty() {
                "none".to_string()
            } else {
                also_kills.join(", ")
            };
            let text = format!(
                "augment {}, assert {}{} equals {} (observed {} under mutant {}); also kills: {}",
                cand.test_id, cand.variable, path, cand.expected, observed, m, also
            );
            Some(Suggestion {
                mutant_id: m.clone(),
                candidate_id: cand.candidate_id.clone(),
                test_id: cand.test_id.clone(),
                variable: cand.variable.clone(),
                node_id: cand.node_id.clone(),
                access_path: path,
                assertion_kind: cand.assertion_kind,
                expected: cand.expected.clone(),
                observed,
                also_kills,
                text,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Markdown, Format::Csv, Format::Json];
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

/// Everything a report renders. `matrix` is the matrix the strategies ran
/// on, normally the depth-filtered one.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub project: &'a str,
    pub stats: &'a KillableStats,
    pub matrix: &'a CandidateMatrix,
    pub selections: &'a [AggregatedSelection],
    pub capability: Option<&'a CapabilityReport>,
}

fn int(f: &Fraction) -> String {
    f.round_half_up(0)
}

/// Killability summary: one row per project.
pub fn stats_csv(project: &str, stats: &KillableStats) -> String {
    let mut out = String::from(
        "project,killable_surviving,killable,surviving,mean_assert,mean_var,mean_test,total_assert,total_var,total_test,mean_var_global,total_var_global,mean_depth,averages_defined\n",
    );
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        csv_field(project),
        csv_field(&stats.killable_label()),
        stats.killable,
        stats.surviving,
        int(&stats.mean_ways_assert),
        int(&stats.mean_ways_var),
        int(&stats.mean_ways_test),
        stats.total_assert,
        stats.total_var,
        stats.total_test,
        int(&stats.mean_ways_var_global),
        stats.total_var_global,
        stats.mean_depth.round_half_up(1),
        stats.averages_defined,
    );
    out
}

fn find(selections: &[AggregatedSelection], s: Strategy) -> Option<&AggregatedSelection> {
    selections.iter().find(|a| a.strategy == s)
}

/// Strategy comparison: one column triple per strategy, the strategy's own
/// metric carrying its crossfire factor.
pub fn selection_summary_csv(project: &str, dep: &Fraction, selections: &[AggregatedSelection]) -> String {
    let mut out = String::from("project,kill,dep");
    for s in Strategy::ALL {
        let p = s.as_str();
        let _ = write!(out, ",{p}:assert,{p}:var,{p}:test,{p}:factor");
    }
    out.push('\n');
    let kill = selections.first().map(|a| a.killable).unwrap_or(0);
    let _ = write!(out, "{},{},{}", csv_field(project), kill, dep.round_half_up(1));
    for s in Strategy::ALL {
        match find(selections, s) {
            Some(a) => {
                let _ = write!(
                    out,
                    ",{},{},{},{}",
                    a.mean_assertions.round_half_up(1),
                    a.mean_variables.round_half_up(1),
                    a.mean_tests.round_half_up(1),
                    a.factor_of_means.round_half_up(1)
                );
            }
            None => out.push_str(",,,,"),
        }
    }
    out.push('\n');
    out
}

pub fn render_markdown(inputs: &ReportInputs<'_>) -> String {
    let stats = inputs.stats;
    let mut out = String::new();
    let _ = writeln!(out, "# Crossfire report: {}\n", inputs.project);

    let _ = writeln!(out, "## Killable surviving mutants\n");
    let _ = writeln!(
        out,
        "| Project | #Killable/#Surviving | avg #assert | avg #var | avg #test | #Assert | #Var | #Test |"
    );
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---:|---:|");
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
        inputs.project,
        stats.killable_label(),
        int(&stats.mean_ways_assert),
        int(&stats.mean_ways_var),
        int(&stats.mean_ways_test),
        stats.total_assert,
        stats.total_var,
        stats.total_test,
    );
    if stats.killable == 0 {
        let _ = writeln!(
            out,
            "No killable mutants: no surviving mutant left a deterministic infection visible from a test variable.\n"
        );
    } else {
        let _ = writeln!(
            out,
            "Variables counted across tests: {} in total, {} per killable mutant on average. Mean access depth over all candidates: {}.\n",
            stats.total_var_global,
            int(&stats.mean_ways_var_global),
            stats.mean_depth.round_half_up(1),
        );
    }

    if !inputs.selections.is_empty() && stats.killable > 0 {
        let dep = inputs.matrix.mean_depth().unwrap_or_else(Fraction::zero);
        let repeats = inputs.selections[0].repeats;
        let _ = writeln!(out, "## Killing strategies (mean of {repeats} runs)\n");
        let mut header = String::from("| Project | #Kill | Dep |");
        let mut rule = String::from("|---|---:|---:|");
        for s in Strategy::ALL {
            if find(inputs.selections, s).is_some() {
                let _ = write!(header, " {s}: #Assert | #Var | #Test |");
                rule.push_str("---:|---:|---:|");
            }
        }
        let _ = writeln!(out, "{header}\n{rule}");
        let kill = inputs.selections[0].killable;
        let _ = write!(out, "| {} | {} | {} |", inputs.project, kill, dep.round_half_up(1));
        for s in Strategy::ALL {
            let Some(a) = find(inputs.selections, s) else { continue };
            let cells = [
                (Strategy::AssertionGreedy, &a.mean_assertions),
                (Strategy::VariableGreedy, &a.mean_variables),
                (Strategy::TestGreedy, &a.mean_tests),
            ];
            for (owner, value) in cells {
                if owner == s {
                    let _ = write!(out, " **{}** |", count_with_factor(value, &a.factor_of_means));
                } else {
                    let _ = write!(out, " {} |", value.round_half_up(1));
                }
            }
        }
        out.push_str("\n\n");
    }

    let cards = suggestions(inputs.matrix, find(inputs.selections, Strategy::AssertionGreedy));
    let _ = writeln!(out, "## Suggested assertions\n");
    if cards.is_empty() {
        let _ = writeln!(out, "No killable mutants, so no assertions to suggest.\n");
    }
    for c in &cards {
        let _ = writeln!(out, "- `{}`: {}", c.mutant_id, c.text);
    }
    if !cards.is_empty() {
        out.push('\n');
    }

    if let Some(cap) = inputs.capability {
        let _ = writeln!(out, "## Kill capability of existing tests\n");
        let _ = writeln!(out, "| Test | Mutants killed | Assertions | Kills per assertion |");
        let _ = writeln!(out, "|---|---:|---:|---|");
        for t in &cap.tests {
            let per: Vec<String> = t.assertions.iter().map(|a| a.kills.to_string()).collect();
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                t.test_id,
                t.kills,
                t.assertion_count,
                per.join(" ")
            );
        }
        out.push('\n');
    }
    out
}

pub fn render_suggestions_jsonl(inputs: &ReportInputs<'_>) -> String {
    suggestions(inputs.matrix, find(inputs.selections, Strategy::AssertionGreedy))
        .iter()
        .map(|s| canonical_json::to_string(s) + "\n")
        .collect()
}

/// Writes the requested formats under `dir` and returns the paths written,
/// in a fixed order. Rendering is pure, so equal inputs give equal bytes.
pub fn emit_report(dir: &Path, inputs: &ReportInputs<'_>, formats: &[Format]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(&str, String)> = Vec::new();
    let formats: BTreeSet<Format> = formats.iter().copied().collect();
    if formats.contains(&Format::Markdown) {
        files.push(("report.md", render_markdown(inputs)));
    }
    if formats.contains(&Format::Csv) {
        files.push(("stats.csv", stats_csv(inputs.project, inputs.stats)));
        if let Some(cap) = inputs.capability {
            files.push(("capability-grid.csv", cap.grid_csv()));
        }
    }
    if formats.contains(&Format::Json) {
        files.push(("suggestions.jsonl", render_suggestions_jsonl(inputs)));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
