//! Stage orchestration over a corpus directory.
//!
//! Stages run in a fixed order (baseline, diff, matrix, select, report),
//! each reading the previous stage's artifact from the output directory.
//! `cache.json` remembers a digest of every stage's inputs and outputs; a
//! stage whose inputs and outputs are unchanged is skipped.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical_json::{self, digest_hex};
use crate::corpus::{self, load_corpus, Corpus, CorpusError, LoadedCorpus};
use crate::determinism::{build_mask_with, MaskSet, TypeExclusions};
use crate::diff::{diff_mutant, sort_records, InfectionRecord, MutantDiff};
use crate::matrix::{build_candidates, build_matrix, killable_stats, CandidateMatrix, KillableStats, MatrixError};
use crate::ratio::Fraction;
use crate::report::{
    capability_report, emit_report, selection_summary_csv, AssertionInventory, CapabilityError,
    CapabilityReport, Format, ReportInputs,
};
use crate::select::{run_repeated, shortest_depth_filter, AggregatedSelection, Strategy, TieBreak, DEFAULT_REPEATS};
use crate::snapshot::{canonicalize_with, path, CanonicalizeOptions, TestRunSnapshot, DEFAULT_DEPTH_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: PathBuf,
    /// Defaults to `<corpus>/out`.
    pub out: Option<PathBuf>,
    /// Original runs used for the mask: the first `n` runs. Defaults to
    /// the manifest's run count.
    pub n_runs: Option<u32>,
    pub strategies: Vec<Strategy>,
    pub repeats: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
    pub depth_filter: bool,
    pub depth_cap: usize,
    pub exclusions: TypeExclusions,
    pub formats: Vec<Format>,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Name shown in reports; defaults to the corpus directory name.
    pub project: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: PathBuf::from("."),
            out: None,
            n_runs: None,
            strategies: Strategy::ALL.to_vec(),
            repeats: DEFAULT_REPEATS,
            seed: 0,
            tie_break: TieBreak::Random,
            depth_filter: true,
            depth_cap: DEFAULT_DEPTH_CAP,
            exclusions: TypeExclusions::default(),
            formats: Format::ALL.to_vec(),
            jobs: None,
            project: None,
        }
    }
}

impl RunConfig {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| self.corpus.join("out"))
    }

    pub fn project_name(&self) -> String {
        self.project.clone().unwrap_or_else(|| {
            self.corpus
                .canonicalize()
                .ok()
                .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "corpus".to_string())
        })
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.n_runs.is_some_and(|n| n < 2) {
            return bad("n_runs must be at least 2");
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if self.depth_cap == 0 {
            return bad("depth cap must be at least 1");
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required");
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("unreadable artifact {}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Capability(#[from] CapabilityError),
}

impl PipelineError {
    /// 1 for invalid data, 2 for I/O and configuration trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Corpus(CorpusError::InvalidManifest { .. })
            | PipelineError::Matrix(_)
            | PipelineError::Capability(_) => 1,
            _ => 2,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io { path: path.to_path_buf(), source }
    }
}

/// Re-canonicalizes any graph deeper than `cap`, truncating it there.
/// Returns the number of graphs changed.
pub fn apply_depth_cap(corpus: &mut Corpus, cap: usize) -> usize {
    let options = CanonicalizeOptions { depth_cap: cap };
    let mut changed = 0;
    let runs = corpus
        .originals
        .values_mut()
        .flatten()
        .chain(corpus.mutant_runs.values_mut().flat_map(|m| m.values_mut()));
    for run in runs {
        for g in &mut run.variables {
            if g.nodes.iter().any(|n| path::depth(&n.node_id) > cap) {
                if let Ok(c) = canonicalize_with(g, &options) {
                    *g = c;
                    changed += 1;
                }
            }
        }
    }
    changed
}

fn needs_cap(corpus: &Corpus, cap: usize) -> bool {
    corpus
        .originals
        .values()
        .flatten()
        .chain(corpus.mutant_runs.values().flat_map(|m| m.values()))
        .flat_map(|r| &r.variables)
        .flat_map(|g| &g.nodes)
        .any(|n| path::depth(&n.node_id) > cap)
}

/// Masks for every test with enough original runs; the rest map to an
/// error message.
pub fn build_masks(
    corpus: &Corpus,
    n_runs: Option<u32>,
    exclusions: &TypeExclusions,
) -> (MaskSet, BTreeMap<String, String>) {
    let wanted = n_runs.unwrap_or(corpus.manifest.n_runs) as usize;
    let results: Vec<(String, Result<_, String>)> = corpus
        .manifest
        .tests
        .par_iter()
        .map(|test| {
            let runs = corpus.originals.get(test).map(Vec::as_slice).unwrap_or(&[]);
            let usable: Vec<TestRunSnapshot> = runs
                .iter()
                .filter(|r| (r.run_index as usize) < wanted)
                .cloned()
                .collect();
            let result = if usable.len() < wanted {
                Err(format!("only {} of {wanted} original runs are usable", usable.len()))
            } else {
                build_mask_with(&usable, exclusions).map_err(|e| e.to_string())
            };
            (test.clone(), result)
        })
        .collect();
    let mut masks = MaskSet::default();
    let mut errors = BTreeMap::new();
    for (test, r) in results {
        match r {
            Ok(m) => {
                masks.masks.insert(test, m);
            }
            Err(e) => {
                errors.insert(test, e);
            }
        }
    }
    (masks, errors)
}

/// Diffs every surviving mutant against the reference run (index 0).
pub fn diff_corpus(corpus: &Corpus, masks: &MaskSet) -> Vec<MutantDiff> {
    let baselines: BTreeMap<String, TestRunSnapshot> = corpus
        .originals
        .iter()
        .filter(|(t, _)| masks.get(t).is_some())
        .filter_map(|(t, runs)| runs.iter().find(|r| r.run_index == 0).map(|r| (t.clone(), r.clone())))
        .collect();
    let empty = BTreeMap::new();
    let surviving: Vec<_> = corpus.manifest.surviving().collect();
    let mut diffs: Vec<MutantDiff> = surviving
        .par_iter()
        .map(|m| {
            let runs = corpus.mutant_runs.get(&m.mutant_id).unwrap_or(&empty);
            diff_mutant(m, runs, &baselines, masks).unwrap_or_else(|e| MutantDiff {
                mutant_id: m.mutant_id.clone(),
                errors: vec![(String::new(), e.to_string())],
                ..Default::default()
            })
        })
        .collect();
    diffs.sort_by(|a, b| a.mutant_id.cmp(&b.mutant_id));
    diffs
}

pub fn select_all(matrix: &CandidateMatrix, config: &RunConfig) -> Vec<AggregatedSelection> {
    let strategies: BTreeSet<Strategy> = config.strategies.iter().copied().collect();
    strategies
        .into_iter()
        .map(|s| run_repeated(matrix, s, config.repeats, config.seed, config.tie_break))
        .collect()
}

/// Everything the pipeline computes, held in memory.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub masks: MaskSet,
    pub mask_errors: BTreeMap<String, String>,
    pub diffs: Vec<MutantDiff>,
    pub records: Vec<InfectionRecord>,
    pub matrix: CandidateMatrix,
    /// The matrix the strategies ran on: depth-filtered unless disabled.
    pub selected_from: CandidateMatrix,
    pub stats: KillableStats,
    pub selections: Vec<AggregatedSelection>,
}

/// Runs every stage in memory. Paths, formats and jobs in `config` are
/// ignored.
pub fn analyze(corpus: &Corpus, config: &RunConfig) -> Result<Analysis, PipelineError> {
    config.check()?;
    let corpus = if needs_cap(corpus, config.depth_cap) {
        let mut c = corpus.clone();
        apply_depth_cap(&mut c, config.depth_cap);
        Cow::Owned(c)
    } else {
        Cow::Borrowed(corpus)
    };
    let (masks, mask_errors) = build_masks(&corpus, config.n_runs, &config.exclusions);
    let diffs = diff_corpus(&corpus, &masks);
    let mut records: Vec<InfectionRecord> = diffs.iter().flat_map(|d| d.records.iter().cloned()).collect();
    sort_records(&mut records);
    let matrix = build_matrix(build_candidates(&records)?);
    let stats = killable_stats(&matrix, &corpus.manifest);
    let selected_from = if config.depth_filter { shortest_depth_filter(&matrix) } else { matrix.clone() };
    let selections = select_all(&selected_from, config);
    Ok(Analysis { masks, mask_errors, diffs, records, matrix, selected_from, stats, selections })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Baseline,
    Diff,
    Matrix,
    Select,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Baseline, Stage::Diff, Stage::Matrix, Stage::Select, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Baseline => "baseline",
            Stage::Diff => "diff",
            Stage::Matrix => "matrix",
            Stage::Select => "select",
            Stage::Report => "report",
        }
    }
}

pub const MASK: &str = "mask.json";
pub const INFECTIONS: &str = "infections.jsonl";
pub const DIAGNOSTICS: &str = "diagnostics.json";
pub const MATRIX: &str = "matrix.json";
pub const STATS: &str = "stats.json";
pub const SELECTION: &str = "selection.json";
pub const SELECTION_SUMMARY: &str = "selection-summary.csv";
pub const CACHE: &str = "cache.json";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskArtifact {
    pub masks: MaskSet,
    /// Tests without a mask, with the reason.
    pub errors: BTreeMap<String, String>,
    /// Corpus files that failed to load or validate.
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffFailure {
    pub mutant_id: String,
    pub test_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub errors: Vec<DiffFailure>,
    pub notices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionArtifact {
    pub depth_filter: bool,
    pub killable: u64,
    /// Mean candidate depth of the matrix the strategies ran on.
    pub mean_depth: Fraction,
    pub strategies: Vec<AggregatedSelection>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct StageCache {
    input: String,
    outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub stage: Stage,
    pub skipped: bool,
    /// Validation failures and per-test errors found by this stage.
    pub problems: Vec<String>,
}

/// Runs stages against one corpus directory, reusing cached artifacts.
pub struct Pipeline {
    config: RunConfig,
    out: PathBuf,
    loaded: Option<LoadedCorpus>,
    cache: BTreeMap<String, StageCache>,
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|e| PipelineError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, PipelineError> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| PipelineError::Artifact { path: path.to_path_buf(), message: e.to_string() })
}

/// Digests of every file under `dir`, keyed by path relative to `root`.
fn digest_tree(root: &Path, dir: &Path, into: &mut BTreeMap<String, String>) -> Result<(), PipelineError> {
    let rd = match fs::read_dir(dir) {
        Ok(rd) => rd,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(PipelineError::io(dir, e)),
    };
    let mut paths: Vec<PathBuf> = rd
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::io(dir, e))?;
    paths.sort();
    for p in paths {
        if p.is_dir() {
            digest_tree(root, &p, into)?;
        } else {
            digest_file(root, &p, into)?;
        }
    }
    Ok(())
}

fn digest_file(root: &Path, file: &Path, into: &mut BTreeMap<String, String>) -> Result<(), PipelineError> {
    let key = file.strip_prefix(root).unwrap_or(file).to_string_lossy().replace('\\', "/");
    let value = match fs::read(file) {
        Ok(bytes) => digest_hex(&bytes),
        Err(e) if e.kind() == io::ErrorKind::NotFound => "absent".to_string(),
        Err(e) => return Err(PipelineError::io(file, e)),
    };
    into.insert(key, value);
    Ok(())
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Result<Self, PipelineError> {
        config.check()?;
        if !config.corpus.join(corpus::MANIFEST).is_file() {
            return Err(CorpusError::MissingManifest(config.corpus.clone()).into());
        }
        let out = config.out_dir();
        fs::create_dir_all(&out).map_err(|e| PipelineError::io(&out, e))?;
        let cache_path = out.join(CACHE);
        let cache = if cache_path.is_file() {
            read_json(&cache_path).unwrap_or_else(|e| {
                warn!("ignoring unreadable cache: {e}");
                BTreeMap::new()
            })
        } else {
            BTreeMap::new()
        };
        Ok(Pipeline { config, out, loaded: None, cache })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    fn corpus(&mut self) -> Result<&LoadedCorpus, PipelineError> {
        if self.loaded.is_none() {
            let mut loaded = load_corpus(&self.config.corpus)?;
            let n = apply_depth_cap(&mut loaded.corpus, self.config.depth_cap);
            if n > 0 {
                info!("truncated {n} graphs at depth {}", self.config.depth_cap);
            }
            self.loaded = Some(loaded);
        }
        Ok(self.loaded.as_ref().expect("just loaded"))
    }

    fn outputs(&self, stage: Stage) -> Vec<&'static str> {
        match stage {
            Stage::Baseline => vec![MASK],
            Stage::Diff => vec![INFECTIONS, DIAGNOSTICS],
            Stage::Matrix => vec![MATRIX, STATS],
            Stage::Select => vec![SELECTION, SELECTION_SUMMARY],
            Stage::Report => {
                let f: BTreeSet<Format> = self.config.formats.iter().copied().collect();
                let mut names = Vec::new();
                if f.contains(&Format::Markdown) {
                    names.push("report.md");
                }
                if f.contains(&Format::Csv) {
                    names.push("stats.csv");
                    if self.config.corpus.join(corpus::KILLS).is_file() {
                        names.push("capability-grid.csv");
                    }
                }
                if f.contains(&Format::Json) {
                    names.push("suggestions.jsonl");
                }
                names
            }
        }
    }

    fn input_digest(&self, stage: Stage) -> Result<String, PipelineError> {
        let root = &self.config.corpus;
        let c = &self.config;
        let mut inputs = BTreeMap::new();
        let artifact = |name: &str, into: &mut BTreeMap<String, String>| digest_file(&self.out, &self.out.join(name), into);
        digest_file(root, &root.join(corpus::MANIFEST), &mut inputs)?;
        let settings = match stage {
            Stage::Baseline => {
                digest_tree(root, &root.join("runs/original"), &mut inputs)?;
                canonical_json::to_string(&(c.n_runs, &c.exclusions, c.depth_cap))
            }
            Stage::Diff => {
                artifact(MASK, &mut inputs)?;
                digest_tree(root, &root.join("runs/original/run-0"), &mut inputs)?;
                digest_tree(root, &root.join("runs/mutants"), &mut inputs)?;
                canonical_json::to_string(&c.depth_cap)
            }
            Stage::Matrix => {
                artifact(INFECTIONS, &mut inputs)?;
                String::new()
            }
            Stage::Select => {
                artifact(MATRIX, &mut inputs)?;
                let strategies: BTreeSet<Strategy> = c.strategies.iter().copied().collect();
                canonical_json::to_string(&(strategies, c.repeats, c.seed, c.tie_break, c.depth_filter))
            }
            Stage::Report => {
                for name in [MATRIX, STATS, SELECTION] {
                    artifact(name, &mut inputs)?;
                }
                digest_file(root, &root.join(corpus::KILLS), &mut inputs)?;
                digest_file(root, &root.join(corpus::INVENTORY), &mut inputs)?;
                let formats: BTreeSet<Format> = c.formats.iter().copied().collect();
                canonical_json::to_string(&(formats, c.project_name(), c.depth_filter))
            }
        };
        inputs.insert("$settings".into(), settings);
        Ok(digest_hex(&canonical_json::to_vec(&inputs)))
    }

    fn output_digests(&self, stage: Stage) -> Result<Option<BTreeMap<String, String>>, PipelineError> {
        let mut out = BTreeMap::new();
        for name in self.outputs(stage) {
            let path = self.out.join(name);
            if !path.is_file() {
                return Ok(None);
            }
            out.insert(name.to_string(), digest_hex(&read(&path)?));
        }
        Ok(Some(out))
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.out.join(name);
        fs::write(&path, bytes).map_err(|e| PipelineError::io(&path, e))
    }

    fn save_cache(&self) -> Result<(), PipelineError> {
        self.write(CACHE, &canonical_json::to_vec(&self.cache))
    }

    /// Runs `target` and every stage before it, skipping up-to-date ones.
    pub fn run(&mut self, target: Stage) -> Result<Vec<StageReport>, PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.jobs.unwrap_or(0))
            .build()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        let mut reports = Vec::new();
        for stage in Stage::ALL.into_iter().filter(|s| *s <= target) {
            let report = pool.install(|| self.run_one(stage))?;
            reports.push(report);
        }
        Ok(reports)
    }

    fn run_one(&mut self, stage: Stage) -> Result<StageReport, PipelineError> {
        let input = self.input_digest(stage)?;
        let fresh = self.cache.get(stage.name()).is_some_and(|c| c.input == input)
            && self.output_digests(stage)?.as_ref() == self.cache.get(stage.name()).map(|c| &c.outputs);
        let problems = if fresh {
            info!("{}: up to date", stage.name());
            self.recorded_problems(stage)?
        } else {
            info!("{}: running", stage.name());
            let problems = self.execute(stage)?;
            let outputs = self.output_digests(stage)?.unwrap_or_default();
            self.cache.insert(stage.name().to_string(), StageCache { input, outputs });
            self.save_cache()?;
            problems
        };
        Ok(StageReport { stage, skipped: fresh, problems })
    }

    fn recorded_problems(&self, stage: Stage) -> Result<Vec<String>, PipelineError> {
        Ok(match stage {
            Stage::Baseline => {
                let a: MaskArtifact = read_json(&self.out.join(MASK))?;
                mask_problems(&a)
            }
            Stage::Diff => {
                let d: Diagnostics = read_json(&self.out.join(DIAGNOSTICS))?;
                diff_problems(&d)
            }
            _ => Vec::new(),
        })
    }

    fn execute(&mut self, stage: Stage) -> Result<Vec<String>, PipelineError> {
        match stage {
            Stage::Baseline => {
                let n_runs = self.config.n_runs;
                let exclusions = self.config.exclusions.clone();
                let loaded = self.corpus()?;
                if let Some(n) = n_runs.filter(|&n| n > loaded.corpus.manifest.n_runs) {
                    return Err(PipelineError::Config(format!(
                        "{n} runs requested but the manifest records {}",
                        loaded.corpus.manifest.n_runs
                    )));
                }
                let (masks, errors) = build_masks(&loaded.corpus, n_runs, &exclusions);
                let artifact = MaskArtifact {
                    masks,
                    errors,
                    problems: loaded.problems.iter().map(ToString::to_string).collect(),
                };
                self.write(MASK, &canonical_json::to_vec(&artifact))?;
                Ok(mask_problems(&artifact))
            }
            Stage::Diff => {
                let artifact: MaskArtifact = read_json(&self.out.join(MASK))?;
                let loaded = self.corpus()?;
                let diffs = diff_corpus(&loaded.corpus, &artifact.masks);
                let mut lines = String::new();
                let mut diagnostics = Diagnostics::default();
                for d in &diffs {
                    for r in &d.records {
                        lines.push_str(&canonical_json::to_string(r));
                        lines.push('\n');
                    }
                    for (test, message) in &d.errors {
                        diagnostics.errors.push(DiffFailure {
                            mutant_id: d.mutant_id.clone(),
                            test_id: test.clone(),
                            message: message.clone(),
                        });
                    }
                    diagnostics.notices.extend(d.notices.iter().cloned());
                }
                diagnostics.errors.sort();
                diagnostics.notices.sort();
                diagnostics.notices.dedup();
                self.write(INFECTIONS, lines.as_bytes())?;
                self.write(DIAGNOSTICS, &canonical_json::to_vec(&diagnostics))?;
                Ok(diff_problems(&diagnostics))
            }
            Stage::Matrix => {
                let path = self.out.join(INFECTIONS);
                let text = String::from_utf8(read(&path)?)
                    .map_err(|e| PipelineError::Artifact { path: path.clone(), message: e.to_string() })?;
                let records = text
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(serde_json::from_str)
                    .collect::<Result<Vec<InfectionRecord>, _>>()
                    .map_err(|e| PipelineError::Artifact { path: path.clone(), message: e.to_string() })?;
                let (manifest, _) = corpus::load_manifest(&self.config.corpus)?;
                let matrix = build_matrix(build_candidates(&records)?);
                let stats = killable_stats(&matrix, &manifest);
                self.write(MATRIX, &canonical_json::to_vec(&matrix))?;
                self.write(STATS, &canonical_json::to_vec(&stats))?;
                Ok(Vec::new())
            }
            Stage::Select => {
                let matrix: CandidateMatrix = read_json(&self.out.join(MATRIX))?;
                let from = if self.config.depth_filter { shortest_depth_filter(&matrix) } else { matrix };
                let strategies = select_all(&from, &self.config);
                let mean_depth = from.mean_depth().unwrap_or_else(Fraction::zero);
                let csv = selection_summary_csv(&self.config.project_name(), &mean_depth, &strategies);
                let artifact = SelectionArtifact {
                    depth_filter: self.config.depth_filter,
                    killable: from.killable_mutants.len() as u64,
                    mean_depth,
                    strategies,
                };
                self.write(SELECTION, &canonical_json::to_vec(&artifact))?;
                self.write(SELECTION_SUMMARY, csv.as_bytes())?;
                Ok(Vec::new())
            }
            Stage::Report => {
                let matrix: CandidateMatrix = read_json(&self.out.join(MATRIX))?;
                let stats: KillableStats = read_json(&self.out.join(STATS))?;
                let selection: SelectionArtifact = read_json(&self.out.join(SELECTION))?;
                let from = if selection.depth_filter { shortest_depth_filter(&matrix) } else { matrix };
                let capability = self.capability()?;
                let project = self.config.project_name();
                let inputs = ReportInputs {
                    project: &project,
                    stats: &stats,
                    matrix: &from,
                    selections: &selection.strategies,
                    capability: capability.as_ref(),
                };
                emit_report(&self.out, &inputs, &self.config.formats).map_err(|e| PipelineError::io(&self.out, e))?;
                Ok(Vec::new())
            }
        }
    }

    fn capability(&mut self) -> Result<Option<CapabilityReport>, PipelineError> {
        if !self.config.corpus.join(corpus::KILLS).is_file() {
            return Ok(None);
        }
        let loaded = self.corpus()?;
        let c = &loaded.corpus;
        let inventory = c.inventory.clone().unwrap_or_else(|| AssertionInventory::from_records(&c.kills));
        Ok(Some(capability_report(&c.kills, &inventory)?))
    }
}

fn mask_problems(a: &MaskArtifact) -> Vec<String> {
    let mut out = a.problems.clone();
    out.extend(a.errors.iter().map(|(t, e)| format!("test {t}: {e}")));
    out
}

fn diff_problems(d: &Diagnostics) -> Vec<String> {
    d.errors
        .iter()
        .map(|e| format!("mutant {} test {}: {}", e.mutant_id, e.test_id, e.message))
        .collect()
}
