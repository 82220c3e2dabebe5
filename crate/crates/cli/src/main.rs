use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use crossfire::corpus::{load_corpus, write_corpus, CorpusError};
use crossfire::determinism::TypeExclusions;
use crossfire::pipeline::{Pipeline, PipelineError, RunConfig, Stage, StageReport};
use crossfire::report::Format;
use crossfire::select::{Strategy, TieBreak, DEFAULT_REPEATS};
use crossfire::snapshot::DEFAULT_DEPTH_CAP;
use crossfire::synth::{self, fixtures, ScenarioSpec};

/// Find what surviving mutants leave behind in passing tests, and pick
/// assertions that kill them.
#[derive(Parser)]
#[command(name = "crossfire", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CROSSFIRE_JOBS")]
    jobs: Option<usize>,

    /// More log output on stderr; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every snapshot, the manifest and kill records without analysing.
    Validate {
        #[arg(env = "CROSSFIRE_CORPUS")]
        corpus: PathBuf,
    },
    /// Build determinism masks from the original runs.
    Baseline(RunArgs),
    /// Diff surviving mutants against the reference run.
    Diff(RunArgs),
    /// Build assertion candidates and the kill matrix.
    Matrix(RunArgs),
    /// Run the selection strategies.
    Select(RunArgs),
    /// Write the reports.
    Report(RunArgs),
    /// Every stage, reusing cached results.
    Pipeline(RunArgs),
    /// Generate a synthetic corpus with its ground truth.
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(env = "CROSSFIRE_CORPUS")]
    corpus: PathBuf,
    /// Output directory (default: <corpus>/out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use only the first N original runs for the masks.
    #[arg(long)]
    runs: Option<u32>,
    /// Treat values of matching types as nondeterministic (`java.util.Date`, or a prefix such as `java.time.*`).
    #[arg(long = "exclude-type", value_name = "PATTERN")]
    exclude_types: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
    depth_cap: usize,
    /// Strategy to run; repeat for several (default: all three).
    #[arg(long = "strategy")]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random")]
    tie_break: TieBreak,
    /// Select from every candidate, not only the shallowest per mutant.
    #[arg(long)]
    no_depth_filter: bool,
    /// Report format; repeat for several (default: all).
    #[arg(long = "format")]
    formats: Vec<Format>,
    /// Project name shown in reports (default: corpus directory name).
    #[arg(long)]
    project: Option<String>,
}

impl RunArgs {
    fn config(self, jobs: Option<usize>) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            corpus: self.corpus,
            out: self.out,
            n_runs: self.runs,
            strategies: if self.strategies.is_empty() { d.strategies } else { self.strategies },
            repeats: self.repeats,
            seed: self.seed,
            tie_break: self.tie_break,
            depth_filter: !self.no_depth_filter,
            depth_cap: self.depth_cap,
            exclusions: TypeExclusions::new(self.exclude_types),
            formats: if self.formats.is_empty() { d.formats } else { self.formats },
            jobs,
            project: self.project,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Directory to write the corpus and truth.json into.
    out: PathBuf,
    /// Write the small two-test example instead of a random scenario.
    #[arg(long)]
    example: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    tests: Option<usize>,
    #[arg(long)]
    mutants: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    min_vars: Option<usize>,
    #[arg(long)]
    max_vars: Option<usize>,
    #[arg(long)]
    min_fanout: Option<usize>,
    #[arg(long)]
    max_fanout: Option<usize>,
    #[arg(long)]
    surviving: Option<f64>,
    #[arg(long)]
    killable: Option<f64>,
    #[arg(long)]
    max_plantings: Option<usize>,
    #[arg(long)]
    max_covering: Option<usize>,
    #[arg(long)]
    alias_rate: Option<f64>,
    #[arg(long)]
    cycle_rate: Option<f64>,
    #[arg(long)]
    nondeterminism: Option<f64>,
    #[arg(long)]
    masked_rate: Option<f64>,
}

impl GenArgs {
    fn spec(&self) -> ScenarioSpec {
        let d = ScenarioSpec::default();
        ScenarioSpec {
            seed: self.seed,
            n_runs: self.runs.unwrap_or(d.n_runs),
            tests: self.tests.unwrap_or(d.tests),
            variables_per_test: (
                self.min_vars.unwrap_or(d.variables_per_test.0),
                self.max_vars.unwrap_or(d.variables_per_test.1),
            ),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            fanout: (self.min_fanout.unwrap_or(d.fanout.0), self.max_fanout.unwrap_or(d.fanout.1)),
            mutants: self.mutants.unwrap_or(d.mutants),
            surviving_fraction: self.surviving.unwrap_or(d.surviving_fraction),
            killable_fraction: self.killable.unwrap_or(d.killable_fraction),
            max_plantings: self.max_plantings.unwrap_or(d.max_plantings),
            max_covering_tests: self.max_covering.unwrap_or(d.max_covering_tests),
            alias_rate: self.alias_rate.unwrap_or(d.alias_rate),
            cycle_rate: self.cycle_rate.unwrap_or(d.cycle_rate),
            nondeterminism_rate: self.nondeterminism.unwrap_or(d.nondeterminism_rate),
            masked_rate: self.masked_rate.unwrap_or(d.masked_rate),
        }
    }
}

fn validate(corpus: PathBuf) -> Result<u8, PipelineError> {
    let loaded = load_corpus(&corpus)?;
    for p in &loaded.problems {
        println!("{p}");
    }
    let c = &loaded.corpus;
    let snapshots = c.originals.values().map(Vec::len).sum::<usize>()
        + c.mutant_runs.values().map(|m| m.len()).sum::<usize>();
    println!(
        "{} tests, {} mutants, {snapshots} snapshots, {} kill records: {} problems",
        c.manifest.tests.len(),
        c.manifest.mutants.len(),
        c.kills.len(),
        loaded.problems.len()
    );
    Ok(u8::from(!loaded.problems.is_empty()))
}

fn run(config: RunConfig, target: Stage) -> Result<u8, PipelineError> {
    let mut pipeline = Pipeline::new(config)?;
    let reports = pipeline.run(target)?;
    let mut problems = 0;
    for StageReport { stage, skipped, problems: p } in &reports {
        for line in p {
            println!("{}: {line}", stage.name());
        }
        println!(
            "{}: {} ({} problems)",
            stage.name(),
            if *skipped { "up to date" } else { "done" },
            p.len()
        );
        problems += p.len();
    }
    println!("artifacts in {}", pipeline.out_dir().display());
    Ok(u8::from(problems > 0))
}

fn generate(args: GenArgs) -> anyhow::Result<u8> {
    let generated = if args.example { fixtures::two_tests() } else { synth::generate_corpus(&args.spec())? };
    write_corpus(&args.out, &generated.corpus)?;
    synth::write_truth(&args.out, &generated.truth)?;
    println!(
        "{} tests, {} mutants ({} surviving, {} killable) in {}",
        generated.corpus.manifest.tests.len(),
        generated.corpus.manifest.mutants.len(),
        generated.truth.surviving.len(),
        generated.truth.killable.len(),
        args.out.display()
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_env("CROSSFIRE_LOG").init();

    let jobs = cli.jobs;
    let stage = |args: RunArgs, s| run(args.config(jobs), s);
    let result = match cli.command {
        Command::Validate { corpus } => validate(corpus),
        Command::Baseline(a) => stage(a, Stage::Baseline),
        Command::Diff(a) => stage(a, Stage::Diff),
        Command::Matrix(a) => stage(a, Stage::Matrix),
        Command::Select(a) => stage(a, Stage::Select),
        Command::Report(a) | Command::Pipeline(a) => stage(a, Stage::Report),
        Command::Gen(a) => {
            return match generate(a) {
                Ok(code) => ExitCode::from(code),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            }
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let PipelineError::Corpus(CorpusError::MissingManifest(_)) = e {
                eprintln!("hint: a corpus directory holds manifest.json and runs/");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
