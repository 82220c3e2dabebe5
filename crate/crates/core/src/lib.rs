//! Finds state infections that surviving mutants leave behind in passing
//! tests, turns them into assertion candidates, and picks small candidate
//! sets that kill every killable mutant.
//!
//! The pipeline, stage by stage:
//!
//! 1. [`snapshot`]: canonical object graphs of end-of-test state.
//! 2. [`determinism`]: which locations agree across repeated original runs.
//! 3. [`diff`]: halting breadth-first comparison of original and mutant graphs.
//! 4. [`matrix`]: assertion candidates and the candidate-to-mutant matrix.
//! 5. [`select`]: the shortest-depth filter and the three greedy strategies.
//! 6. [`report`]: summaries, suggestion cards, kill-capability grids.
//!
//! [`synth`] generates corpora with planted ground truth, and [`pipeline`]
//! wires the stages over a corpus directory. The guide under `book/` walks
//! through each concept; its code samples run as doctests in [`guide`].

pub mod canonical_json;
pub mod corpus;
pub mod determinism;
pub mod diff;
pub mod guide;
pub mod matrix;
pub mod pipeline;
pub mod ratio;
pub mod report;
pub mod select;
pub mod snapshot;
pub mod synth;
