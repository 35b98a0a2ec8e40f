//! Schema context rules: table existence and column scoping.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{ColumnRef, SqlAst};
use super::schema::{DataModelSchema, SchemaIndex, TableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    UnknownTable,
    UnknownColumn,
    ColumnNotInScope,
    AmbiguousColumn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.location)
    }
}

/// Checks `ast` against `schema`. An empty result means the query is valid.
///
/// The FROM/JOIN tables form the scope of every column reference, ON
/// clauses included. A table named twice counts once.
pub fn validate_against_schema(ast: &SqlAst, schema: &DataModelSchema) -> Vec<Violation> {
    validate_with_index(ast, &schema.index())
}

pub fn validate_with_index(ast: &SqlAst, index: &SchemaIndex) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut scope: Vec<TableId> = Vec::new();
    for name in ast.tables() {
        match index.table_id(name) {
            Some(t) => {
                if !scope.contains(&t) {
                    scope.push(t)
                }
            }
            None => violations.push(Violation {
                kind: ViolationKind::UnknownTable,
                location: format!("table {name}"),
            }),
        }
    }
    for col in ast.column_refs() {
        if let Some(kind) = check_column(col, &scope, index) {
            violations.push(Violation {
                kind,
                location: format!("column {col}"),
            });
        }
    }
    violations
}

fn check_column(col: &ColumnRef, scope: &[TableId], index: &SchemaIndex) -> Option<ViolationKind> {
    let column = index.column_id(&col.column);
    match &col.table {
        Some(table) => {
            let Some(t) = index.table_id(table) else {
                return Some(ViolationKind::UnknownTable);
            };
            match column {
                Some(c) if index.table_has_column(t, c) => {}
                _ => return Some(ViolationKind::UnknownColumn),
            }
            if !scope.contains(&t) {
                return Some(ViolationKind::ColumnNotInScope);
            }
            None
        }
        None => {
            let Some(c) = column else {
                return Some(ViolationKind::UnknownColumn);
            };
            match scope.iter().filter(|&&t| index.table_has_column(t, c)).count() {
                1 => None,
                0 => Some(ViolationKind::ColumnNotInScope),
                _ => Some(ViolationKind::AmbiguousColumn),
            }
        }
    }
}
