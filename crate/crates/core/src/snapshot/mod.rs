//! Object-graph snapshots: the data model, canonical relabeling, structural
//! hashing, the on-disk encoding, and invariant checks.

mod canonicalize;
mod codec;
mod model;
pub mod path;
pub mod primitive;
mod validate;

use thiserror::Error;

pub use canonicalize::{
    canonicalize, canonicalize_with, structural_hash, CanonicalizeOptions, DEFAULT_DEPTH_CAP,
};
pub use codec::{parse, serialize, ParseError};
pub use model::{
    EdgeLabel, GraphEdge, GraphNode, MutantEntry, MutantManifest, MutantStatus, NodeKind,
    ProgramVersion, RootVariable, TestOutcome, TestRunSnapshot, VariableGraph, VariableKind,
};
pub(crate) use model::hex_u64;
pub use validate::{graph_violations, manifest_violations, validate, Violation};
pub(crate) use validate::is_file_safe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed graph: node {0:?} is not reachable from the root")]
    Disconnected(String),
    #[error("malformed graph: duplicate label {label} under {parent:?}")]
    DuplicateLabel { parent: String, label: String },
    #[error("malformed graph: {0}")]
    Malformed(String),
}
