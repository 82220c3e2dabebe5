//! On-disk corpus layout.
//!
//! ```text
//! <root>/manifest.json
//! <root>/runs/original/run-<k>/<test_id>.snap.json
//! <root>/runs/mutants/<mutant_id>/<test_id>.snap.json
//! <root>/kills.jsonl         optional, killed-mutant attribution
//! <root>/assertions.json     optional, assertion inventory
//! ```
//!
//! Loading is lenient: every unreadable or invalid file becomes a
//! [`Problem`] and is left out, so one bad snapshot does not hide the rest.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::canonical_json;
use crate::report::{ingest_kill_records, render_kill_records, AssertionInventory, KillRecord};
use crate::snapshot::{
    self, manifest_violations, MutantManifest, MutantStatus, ProgramVersion, TestRunSnapshot,
};

pub const MANIFEST: &str = "manifest.json";
pub const KILLS: &str = "kills.jsonl";
pub const INVENTORY: &str = "assertions.json";
const SNAP_SUFFIX: &str = ".snap.json";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("no corpus at {}: {MANIFEST} not found", .0.display())]
    MissingManifest(PathBuf),
    #[error("invalid manifest {}: {message}", path.display())]
    InvalidManifest { path: PathBuf, message: String },
}

impl CorpusError {
    fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io { path: path.to_path_buf(), source }
    }
}

/// A file-level finding, with a path relative to the corpus root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Problem {
    pub file: String,
    pub message: String,
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.file, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub manifest: MutantManifest,
    /// Test id to its original runs, ordered by run index.
    pub originals: BTreeMap<String, Vec<TestRunSnapshot>>,
    /// Mutant id to test id to the mutant's run of that test.
    pub mutant_runs: BTreeMap<String, BTreeMap<String, TestRunSnapshot>>,
    pub kills: Vec<KillRecord>,
    pub inventory: Option<AssertionInventory>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub problems: Vec<Problem>,
    /// FNV-1a digest of every file read, keyed by relative path.
    pub digests: BTreeMap<String, u64>,
}

pub fn original_path(root: &Path, run: u32, test_id: &str) -> PathBuf {
    root.join("runs/original")
        .join(format!("run-{run}"))
        .join(format!("{test_id}{SNAP_SUFFIX}"))
}

pub fn mutant_path(root: &Path, mutant_id: &str, test_id: &str) -> PathBuf {
    root.join("runs/mutants")
        .join(mutant_id)
        .join(format!("{test_id}{SNAP_SUFFIX}"))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CorpusError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CorpusError::io(path, e))
}

pub fn write_corpus(root: &Path, corpus: &Corpus) -> Result<(), CorpusError> {
    write_file(&root.join(MANIFEST), &canonical_json::to_vec(&corpus.manifest))?;
    for runs in corpus.originals.values() {
        for run in runs {
            write_file(
                &original_path(root, run.run_index, &run.test_id),
                &snapshot::serialize(run),
            )?;
        }
    }
    for (mutant, runs) in &corpus.mutant_runs {
        for (test, run) in runs {
            write_file(&mutant_path(root, mutant, test), &snapshot::serialize(run))?;
        }
    }
    if !corpus.kills.is_empty() {
        write_file(&root.join(KILLS), render_kill_records(&corpus.kills).as_bytes())?;
    }
    if let Some(inventory) = &corpus.inventory {
        write_file(&root.join(INVENTORY), &canonical_json::to_vec(inventory))?;
    }
    Ok(())
}

pub fn load_manifest(root: &Path) -> Result<(MutantManifest, Vec<u8>), CorpusError> {
    let path = root.join(MANIFEST);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(CorpusError::MissingManifest(root.to_path_buf()))
        }
        Err(e) => return Err(CorpusError::io(&path, e)),
    };
    let manifest = serde_json::from_slice(&bytes).map_err(|e| CorpusError::InvalidManifest {
        path: path.clone(),
        message: e.to_string(),
    })?;
    Ok((manifest, bytes))
}

/// Sorted entries of a directory; a missing directory is empty.
fn entries(dir: &Path) -> Result<Vec<(String, PathBuf, bool)>, CorpusError> {
    let rd = match fs::read_dir(dir) {
        Ok(rd) => rd,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CorpusError::io(dir, e)),
    };
    let mut out = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| CorpusError::io(dir, e))?;
        let path = entry.path();
        let is_dir = path.is_dir();
        out.push((entry.file_name().to_string_lossy().into_owned(), path, is_dir));
    }
    out.sort();
    Ok(out)
}

struct Loader<'a> {
    root: &'a Path,
    manifest: &'a MutantManifest,
    out: LoadedCorpus,
}

impl Loader<'_> {
    fn rel(&self, path: &Path) -> String {
        path.strip_prefix(self.root)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/")
    }

    fn problem(&mut self, path: &Path, message: impl Into<String>) {
        let file = self.rel(path);
        self.out.problems.push(Problem { file, message: message.into() });
    }

    fn read(&mut self, path: &Path) -> Result<Vec<u8>, CorpusError> {
        let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
        self.out
            .digests
            .insert(self.rel(path), canonical_json::fnv1a64(&bytes));
        Ok(bytes)
    }

    /// Reads one snapshot and checks it against its location.
    fn snapshot(
        &mut self,
        path: &Path,
        name: &str,
        version: &ProgramVersion,
        run_index: u32,
    ) -> Result<Option<TestRunSnapshot>, CorpusError> {
        let Some(test_id) = name.strip_suffix(SNAP_SUFFIX) else {
            self.problem(path, "unexpected file; snapshots end in .snap.json");
            return Ok(None);
        };
        let bytes = self.read(path)?;
        let snap = match snapshot::parse(&bytes) {
            Ok(s) => s,
            Err(e) => {
                self.problem(path, e.to_string());
                return Ok(None);
            }
        };
        let mut bad = false;
        if snap.test_id != test_id {
            self.problem(path, format!("file name says test {test_id:?}, content says {:?}", snap.test_id));
            bad = true;
        }
        if &snap.program_version != version {
            self.problem(
                path,
                format!("stored under {version} but program_version is {}", snap.program_version),
            );
            bad = true;
        }
        if snap.run_index != run_index {
            self.problem(path, format!("stored as run {run_index} but run_index is {}", snap.run_index));
            bad = true;
        }
        for v in snapshot::validate(&snap, self.manifest) {
            self.problem(path, v.to_string());
            bad = true;
        }
        Ok((!bad).then_some(snap))
    }
}

/// Loads a corpus directory. Only a missing or unparseable manifest and
/// I/O failures are errors; everything else is reported as a problem.
pub fn load_corpus(root: &Path) -> Result<LoadedCorpus, CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::MissingManifest(root.to_path_buf()));
    }
    let (manifest, manifest_bytes) = load_manifest(root)?;
    let mut loader = Loader { root, manifest: &manifest, out: LoadedCorpus::default() };
    loader
        .out
        .digests
        .insert(MANIFEST.to_string(), canonical_json::fnv1a64(&manifest_bytes));
    for v in manifest_violations(&manifest) {
        loader.problem(&root.join(MANIFEST), v.to_string());
    }

    let mut originals: BTreeMap<String, Vec<TestRunSnapshot>> = BTreeMap::new();
    for (name, path, is_dir) in entries(&root.join("runs/original"))? {
        let run = name.strip_prefix("run-").and_then(|k| k.parse::<u32>().ok());
        let (Some(run), true) = (run, is_dir) else {
            loader.problem(&path, "unexpected entry; expected run-<k> directories");
            continue;
        };
        for (file, fpath, _) in entries(&path)? {
            if let Some(s) = loader.snapshot(&fpath, &file, &ProgramVersion::Original, run)? {
                originals.entry(s.test_id.clone()).or_default().push(s);
            }
        }
    }
    for runs in originals.values_mut() {
        runs.sort_by_key(|r| r.run_index);
    }
    for test in &manifest.tests {
        let have: Vec<u32> = originals.get(test).map(|r| r.iter().map(|s| s.run_index).collect()).unwrap_or_default();
        for k in 0..manifest.n_runs {
            let path = original_path(root, k, test);
            if !have.contains(&k) && !path.exists() {
                loader.problem(&path, "missing original run");
            }
        }
    }

    let mut mutant_runs: BTreeMap<String, BTreeMap<String, TestRunSnapshot>> = BTreeMap::new();
    for (name, path, is_dir) in entries(&root.join("runs/mutants"))? {
        if !is_dir {
            loader.problem(&path, "unexpected entry; expected one directory per mutant");
            continue;
        }
        let version = ProgramVersion::Mutant(name.clone());
        for (file, fpath, _) in entries(&path)? {
            if let Some(s) = loader.snapshot(&fpath, &file, &version, 0)? {
                mutant_runs.entry(name.clone()).or_default().insert(s.test_id.clone(), s);
            }
        }
    }
    for m in manifest.mutants.iter().filter(|m| m.status == MutantStatus::Survived) {
        for test in &m.covering_test_ids {
            let present = mutant_runs.get(&m.mutant_id).is_some_and(|r| r.contains_key(test));
            if !present && manifest.has_test(test) {
                let path = mutant_path(root, &m.mutant_id, test);
                if !path.exists() {
                    loader.problem(&path, "missing covering-test snapshot");
                }
            }
        }
    }

    let mut kills = Vec::new();
    let kills_path = root.join(KILLS);
    if kills_path.exists() {
        let bytes = loader.read(&kills_path)?;
        match std::str::from_utf8(&bytes) {
            Err(e) => loader.problem(&kills_path, e.to_string()),
            Ok(text) => match ingest_kill_records(text, &manifest) {
                Ok(ingested) => {
                    for n in &ingested.notices {
                        log::info!("{KILLS}: {n}");
                    }
                    kills = ingested.records;
                }
                Err(e) => loader.problem(&kills_path, e.to_string()),
            },
        }
    }
    let mut inventory = None;
    let inv_path = root.join(INVENTORY);
    if inv_path.exists() {
        let bytes = loader.read(&inv_path)?;
        match serde_json::from_slice::<AssertionInventory>(&bytes) {
            Ok(inv) => {
                for a in &inv.0 {
                    if !manifest.has_test(&a.test_id) {
                        loader.problem(&inv_path, format!("assertion {a} names an unknown test"));
                    }
                }
                inventory = Some(inv);
            }
            Err(e) => loader.problem(&inv_path, e.to_string()),
        }
    }

    let mut out = loader.out;
    out.problems.sort();
    out.corpus = Corpus { manifest, originals, mutant_runs, kills, inventory };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::{canonicalize, GraphNode, MutantEntry, RootVariable, VariableGraph};

    fn run(version: ProgramVersion, k: u32, test: &str, value: i64) -> TestRunSnapshot {
        let g = VariableGraph::raw(RootVariable::local("x"), "x")
            .with_node(GraphNode::primitive("x", "int", snapshot::primitive::int(value)));
        TestRunSnapshot {
            program_version: version,
            run_index: k,
            test_id: test.into(),
            outcome: None,
            variables: vec![canonicalize(&g).unwrap()],
        }
    }

    fn tiny() -> Corpus {
        let manifest = MutantManifest {
            mutants: vec![MutantEntry {
                mutant_id: "m1".into(),
                location: "A.java:1".into(),
                operator: "inc".into(),
                status: MutantStatus::Survived,
                covering_test_ids: vec!["T".into()],
            }],
            tests: vec!["T".into()],
            n_runs: 2,
        };
        let originals = BTreeMap::from([(
            "T".to_string(),
            vec![run(ProgramVersion::Original, 0, "T", 5), run(ProgramVersion::Original, 1, "T", 5)],
        )]);
        let mutant_runs = BTreeMap::from([(
            "m1".to_string(),
            BTreeMap::from([("T".to_string(), run(ProgramVersion::Mutant("m1".into()), 0, "T", 6))]),
        )]);
        Corpus { manifest, originals, mutant_runs, kills: vec![], inventory: None }
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let c = tiny();
        write_corpus(dir.path(), &c).unwrap();
        assert!(dir.path().join("runs/original/run-1/T.snap.json").is_file());
        assert!(dir.path().join("runs/mutants/m1/T.snap.json").is_file());
        let loaded = load_corpus(dir.path()).unwrap();
        assert!(loaded.problems.is_empty(), "{:?}", loaded.problems);
        assert_eq!(loaded.corpus, c);
        assert_eq!(loaded.digests.len(), 4);
    }

    #[test]
    fn empty_dir_has_no_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_corpus(dir.path()), Err(CorpusError::MissingManifest(_))));
    }

    #[test]
    fn bad_files_become_problems() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path(), &tiny()).unwrap();
        fs::write(original_path(dir.path(), 1, "T"), b"{not json").unwrap();
        fs::remove_file(mutant_path(dir.path(), "m1", "T")).unwrap();
        let loaded = load_corpus(dir.path()).unwrap();
        let files: Vec<&str> = loaded.problems.iter().map(|p| p.file.as_str()).collect();
        assert_eq!(files, vec!["runs/mutants/m1/T.snap.json", "runs/original/run-1/T.snap.json"]);
        assert_eq!(loaded.corpus.originals["T"].len(), 1);
    }

    #[test]
    fn misplaced_snapshot_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let c = tiny();
        write_corpus(dir.path(), &c).unwrap();
        let wrong = run(ProgramVersion::Original, 0, "T", 5);
        fs::write(original_path(dir.path(), 1, "T"), snapshot::serialize(&wrong)).unwrap();
        let loaded = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded.problems.len(), 1, "{:?}", loaded.problems);
        assert!(loaded.problems[0].message.contains("run_index is 0"));
    }
}
