//! Grammar-constrained SQL generation and evaluation toolkit.
//!
//! The crate covers the non-neural parts of a natural-language-to-SQL
//! pipeline: a schema-aware viable-prefix recognizer for constrained
//! decoding, weighted tree edit distance between query ASTs, a small
//! in-memory executor for execution match, template-based data curation,
//! crowd-label quality estimation, the production feedback loop and A/B
//! telemetry metrics.

pub mod decoding;
pub mod exec;
pub mod feedback;
pub mod grammar;
pub mod quality;
pub mod stats;
pub mod ted;
pub mod telemetry;
pub mod templates;

pub use grammar::{
    parse, serialize, validate_against_schema, ColumnRef, ColumnType, DataModelSchema, ParseError, SqlAst, Violation,
    ViolationKind,
};
