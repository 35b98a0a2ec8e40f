//! In-memory evaluation of the SQL subset, for execution match.

mod database;
mod engine;
mod value;

use thiserror::Error;

use crate::grammar::{SchemaError, Violation};

pub use database::{Database, Relation, Table};
pub use engine::{execute, execution_match};
pub use value::{like_match, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("query does not match the database schema: {}", join_violations(.0))]
    SchemaMismatch(Vec<Violation>),
    #[error("type error: {0}")]
    TypeError(String),
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("integer overflow in SUM")]
    Overflow,
    #[error("invalid database schema: {0}")]
    Schema(SchemaError),
    #[error("table {table} row {row} has {got} cells, expected {expected}")]
    RowWidth {
        table: String,
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("table {table} row {row}: cell of column {column} has the wrong type")]
    CellType { table: String, column: String, row: usize },
    #[error("column {table}.{column} has no rows to infer a type from; give it a type")]
    UntypedColumn { table: String, column: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
