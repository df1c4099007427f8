//! Batch toolkit for extracting drug-attribute relations (including adverse
//! drug events) from standoff-annotated clinical text.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`corpus`] — parse/serialize the standoff `.txt`/`.ann` format, tokenize
//!   and sentence-split note text with exact character offsets.
//! * [`rules`] — co-location rule engine: link each non-drug entity to the
//!   nearest drug mention under a configurable traversal mechanism.
//! * [`features`] — candidate-pair generation, five-segment windowing,
//!   word-embedding loading, and padded index encoding.
//! * [`neural`] — a self-contained f64 CNN kernel (sentence and segment
//!   variants) with rmsprop training and checkpointing.
//! * [`eval`] — per-type, micro, and macro P/R/F1 scoring plus per-class
//!   (relation / no-relation) breakdowns.
//! * [`synth`] — deterministic synthetic corpus generator so the whole
//!   pipeline is testable without access-restricted clinical data.
//!
//! All character offsets count Unicode scalar values, not bytes.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod neural;
pub mod rules;
pub mod synth;

#[cfg(test)]
pub(crate) mod testutil;

pub use corpus::{Corpus, Document, Entity, EntityType, Relation, RelationType, Span, Token};
pub use rules::PredictedRelation;
