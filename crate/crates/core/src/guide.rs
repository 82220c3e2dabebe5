//! The guide under `book/src`, one module per chapter. Each chapter's code
//! samples run as doctests, so the book cannot drift from the API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/snapshots.md")]
pub mod snapshots {}

#[doc = include_str!("../../../book/src/determinism.md")]
pub mod determinism {}

#[doc = include_str!("../../../book/src/diff.md")]
pub mod diff {}

#[doc = include_str!("../../../book/src/candidates.md")]
pub mod candidates {}

#[doc = include_str!("../../../book/src/selection.md")]
pub mod selection {}

#[doc = include_str!("../../../book/src/reports.md")]
pub mod reports {}

#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}

#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synthetic {}
