//! Data-model schemas and the lookup index used by validation and decoding.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::keywords::is_valid_identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Int,
    Real,
    Text,
    Bool,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Int => "int",
            ColumnType::Real => "real",
            ColumnType::Text => "text",
            ColumnType::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDef {
    pub name: String,
    pub columns: Vec<ColumnDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("schema has no tables")]
    Empty,
    #[error("table {0} has no columns")]
    NoColumns(String),
    #[error("invalid or reserved identifier {0:?}")]
    InvalidIdentifier(String),
    #[error("duplicate table {0}")]
    DuplicateTable(String),
    #[error("duplicate column {column} in table {table}")]
    DuplicateColumn { table: String, column: String },
}

/// Tables and typed columns of a data model.
///
/// Table names are unique case-insensitively, column names are unique within
/// their table, every table has at least one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct DataModelSchema {
    tables: Vec<TableDef>,
}

#[derive(Deserialize)]
struct RawSchema {
    tables: Vec<TableDef>,
}

impl TryFrom<RawSchema> for DataModelSchema {
    type Error = SchemaError;

    fn try_from(raw: RawSchema) -> Result<Self, Self::Error> {
        DataModelSchema::new(raw.tables)
    }
}

impl DataModelSchema {
    pub fn new(tables: Vec<TableDef>) -> Result<Self, SchemaError> {
        if tables.is_empty() {
            return Err(SchemaError::Empty);
        }
        let mut seen = HashMap::new();
        for t in &tables {
            if !is_valid_identifier(&t.name) {
                return Err(SchemaError::InvalidIdentifier(t.name.clone()));
            }
            if seen.insert(t.name.to_ascii_lowercase(), ()).is_some() {
                return Err(SchemaError::DuplicateTable(t.name.clone()));
            }
            if t.columns.is_empty() {
                return Err(SchemaError::NoColumns(t.name.clone()));
            }
            let mut cols = HashMap::new();
            for c in &t.columns {
                if !is_valid_identifier(&c.name) {
                    return Err(SchemaError::InvalidIdentifier(c.name.clone()));
                }
                if cols.insert(c.name.to_ascii_lowercase(), ()).is_some() {
                    return Err(SchemaError::DuplicateColumn {
                        table: t.name.clone(),
                        column: c.name.clone(),
                    });
                }
            }
        }
        Ok(DataModelSchema { tables })
    }

    /// Convenience constructor: `(table, [(column, type)])`.
    pub fn from_columns(tables: &[(&str, &[(&str, ColumnType)])]) -> Result<Self, SchemaError> {
        DataModelSchema::new(
            tables
                .iter()
                .map(|(name, cols)| TableDef {
                    name: name.to_string(),
                    columns: cols
                        .iter()
                        .map(|(c, ty)| ColumnDef {
                            name: c.to_string(),
                            ty: *ty,
                        })
                        .collect(),
                })
                .collect(),
        )
    }

    pub fn tables(&self) -> &[TableDef] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }

    pub fn index(&self) -> SchemaIndex {
        SchemaIndex::new(self)
    }

    /// Scorer input encoding: `<question> | <table>(<col>,...); <table>(...)`.
    pub fn encode_input(&self, question: &str) -> String {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let cols: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
                format!("{}({})", t.name, cols.join(","))
            })
            .collect::<Vec<_>>()
            .join("; ");
        format!("{question} | {tables}")
    }
}

pub type TableId = usize;
pub type ColumnNameId = usize;

/// Case-folded lookup tables over a schema.
///
/// Column names are interned across tables: two tables with a column called
/// `id` share one [`ColumnNameId`].
#[derive(Debug, Clone)]
pub struct SchemaIndex {
    pub(crate) table_names: Vec<String>,
    table_by_lower: HashMap<String, TableId>,
    pub(crate) column_names: Vec<String>,
    column_by_lower: HashMap<String, ColumnNameId>,
    /// Per table: sorted interned column ids, and the column names in schema order.
    pub(crate) table_columns: Vec<Vec<ColumnNameId>>,
    pub(crate) table_column_order: Vec<Vec<ColumnNameId>>,
    /// Per interned column: tables that have it.
    pub(crate) column_tables: Vec<Vec<TableId>>,
}

impl SchemaIndex {
    pub fn new(schema: &DataModelSchema) -> Self {
        let mut idx = SchemaIndex {
            table_names: Vec::new(),
            table_by_lower: HashMap::new(),
            column_names: Vec::new(),
            column_by_lower: HashMap::new(),
            table_columns: Vec::new(),
            table_column_order: Vec::new(),
            column_tables: Vec::new(),
        };
        for (tid, t) in schema.tables.iter().enumerate() {
            idx.table_names.push(t.name.clone());
            idx.table_by_lower.insert(t.name.to_ascii_lowercase(), tid);
            let mut cols = Vec::new();
            for c in &t.columns {
                let lower = c.name.to_ascii_lowercase();
                let cid = match idx.column_by_lower.get(&lower) {
                    Some(&cid) => cid,
                    None => {
                        let cid = idx.column_names.len();
                        idx.column_names.push(c.name.clone());
                        idx.column_by_lower.insert(lower, cid);
                        idx.column_tables.push(Vec::new());
                        cid
                    }
                };
                idx.column_tables[cid].push(tid);
                cols.push(cid);
            }
            idx.table_column_order.push(cols.clone());
            cols.sort_unstable();
            idx.table_columns.push(cols);
        }
        idx
    }

    pub fn table_count(&self) -> usize {
        self.table_names.len()
    }

    pub fn table_id(&self, name: &str) -> Option<TableId> {
        self.table_by_lower.get(&name.to_ascii_lowercase()).copied()
    }

    pub fn column_id(&self, name: &str) -> Option<ColumnNameId> {
        self.column_by_lower.get(&name.to_ascii_lowercase()).copied()
    }

    pub fn table_has_column(&self, table: TableId, column: ColumnNameId) -> bool {
        self.table_columns[table].binary_search(&column).is_ok()
    }

    pub fn table_name(&self, table: TableId) -> &str {
        &self.table_names[table]
    }

    pub fn column_name(&self, column: ColumnNameId) -> &str {
        &self.column_names[column]
    }

    /// Columns of `table` in schema order.
    pub fn columns_of(&self, table: TableId) -> &[ColumnNameId] {
        &self.table_column_order[table]
    }

    pub fn tables_with_column(&self, column: ColumnNameId) -> &[TableId] {
        &self.column_tables[column]
    }
}
