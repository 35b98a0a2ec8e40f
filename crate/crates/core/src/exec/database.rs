use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grammar::{ColumnDef, ColumnType, DataModelSchema, SchemaError, TableDef};

use super::value::Value;
use super::ExecError;

/// Column names and rows; the shape of every query result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A stored table: typed columns and well-typed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<ColumnDef>,
    pub rows: Vec<Vec<Value>>,
}

/// In-memory tables, immutable once loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDatabase", into = "RawDatabase")]
pub struct Database {
    tables: Vec<Table>,
    schema: DataModelSchema,
}

#[derive(Serialize, Deserialize)]
struct RawDatabase {
    tables: BTreeMap<String, RawTable>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    columns: Vec<RawColumn>,
    #[serde(default)]
    rows: Vec<Vec<Value>>,
}

/// A bare name (type inferred from the rows) or a typed column.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawColumn {
    Name(String),
    Typed(ColumnDef),
}

impl TryFrom<RawDatabase> for Database {
    type Error = ExecError;

    fn try_from(raw: RawDatabase) -> Result<Self, ExecError> {
        let mut tables = Vec::new();
        for (name, t) in raw.tables {
            let columns = t
                .columns
                .into_iter()
                .enumerate()
                .map(|(i, c)| match c {
                    RawColumn::Typed(def) => Ok(def),
                    RawColumn::Name(col) => {
                        let ty = t
                            .rows
                            .iter()
                            .filter_map(|r| r.get(i).and_then(Value::column_type))
                            .reduce(|a, b| if a == b { a } else { widen(a, b) })
                            .ok_or_else(|| ExecError::UntypedColumn {
                                table: name.clone(),
                                column: col.clone(),
                            })?;
                        Ok(ColumnDef { name: col, ty })
                    }
                })
                .collect::<Result<Vec<_>, ExecError>>()?;
            tables.push(Table {
                name,
                columns,
                rows: t.rows,
            });
        }
        Database::new(tables)
    }
}

/// Int and real mix to real; any other mix is left to row checking to reject.
fn widen(a: ColumnType, b: ColumnType) -> ColumnType {
    match (a, b) {
        (ColumnType::Int, ColumnType::Real) | (ColumnType::Real, ColumnType::Int) => ColumnType::Real,
        _ => a,
    }
}

impl From<Database> for RawDatabase {
    fn from(db: Database) -> Self {
        RawDatabase {
            tables: db
                .tables
                .into_iter()
                .map(|t| {
                    (
                        t.name,
                        RawTable {
                            columns: t.columns.into_iter().map(RawColumn::Typed).collect(),
                            rows: t.rows,
                        },
                    )
                })
                .collect(),
        }
    }
}

impl Database {
    /// Checks shapes and cell types. Ints stored in real columns become reals.
    /// Tables are kept sorted by name.
    pub fn new(mut tables: Vec<Table>) -> Result<Self, ExecError> {
        tables.sort_by(|a, b| a.name.cmp(&b.name));
        let schema = DataModelSchema::new(
            tables
                .iter()
                .map(|t| TableDef {
                    name: t.name.clone(),
                    columns: t.columns.clone(),
                })
                .collect(),
        )
        .map_err(ExecError::Schema)?;
        for t in &mut tables {
            for (r, row) in t.rows.iter_mut().enumerate() {
                if row.len() != t.columns.len() {
                    return Err(ExecError::RowWidth {
                        table: t.name.clone(),
                        row: r,
                        expected: t.columns.len(),
                        got: row.len(),
                    });
                }
                for (cell, col) in row.iter_mut().zip(&t.columns) {
                    if let (Value::Int(n), ColumnType::Real) = (&*cell, col.ty) {
                        *cell = Value::Real(*n as f64);
                    }
                    if cell.column_type() != Some(col.ty) {
                        return Err(ExecError::CellType {
                            table: t.name.clone(),
                            column: col.name.clone(),
                            row: r,
                        });
                    }
                }
            }
        }
        Ok(Database { tables, schema })
    }

    pub fn schema(&self) -> &DataModelSchema {
        &self.schema
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }
}

impl Table {
    /// Builds a table from text cells, inferring each column's type: int if
    /// every cell parses as an integer, else real if every cell is numeric,
    /// else bool if every cell is true/false, else text.
    pub fn from_text_rows(name: &str, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Table, ExecError> {
        let width = header.len();
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != width) {
            return Err(ExecError::RowWidth {
                table: name.to_string(),
                row: r,
                expected: width,
                got: row.len(),
            });
        }
        let types: Vec<ColumnType> = (0..width)
            .map(|i| {
                let cells = || rows.iter().map(|r| r[i].trim());
                if cells().all(|c| c.parse::<i64>().is_ok()) {
                    ColumnType::Int
                } else if cells().all(|c| c.parse::<f64>().is_ok_and(f64::is_finite)) {
                    ColumnType::Real
                } else if cells().all(|c| c.eq_ignore_ascii_case("true") || c.eq_ignore_ascii_case("false")) {
                    ColumnType::Bool
                } else {
                    ColumnType::Text
                }
            })
            .collect();
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .zip(&types)
                    .map(|(cell, ty)| {
                        let c = cell.trim();
                        match ty {
                            ColumnType::Int => Value::Int(c.parse().expect("checked")),
                            ColumnType::Real => Value::Real(c.parse().expect("checked")),
                            ColumnType::Bool => Value::Bool(c.eq_ignore_ascii_case("true")),
                            ColumnType::Text => Value::Text(cell),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Table {
            name: name.to_string(),
            columns: header
                .into_iter()
                .zip(types)
                .map(|(name, ty)| ColumnDef { name, ty })
                .collect(),
            rows,
        })
    }
}

impl From<SchemaError> for ExecError {
    fn from(e: SchemaError) -> Self {
        ExecError::Schema(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_with_inferred_and_typed_columns() {
        let json = r#"{"tables":{"t":{"columns":["a",{"name":"b","type":"real"}],"rows":[[1,2],[3,4.5]]}}}"#;
        let db: Database = serde_json::from_str(json).unwrap();
        let t = db.table("T").unwrap();
        assert_eq!(t.columns[0].ty, ColumnType::Int);
        assert_eq!(t.rows[0][1], Value::Real(2.0));
        let bad = r#"{"tables":{"t":{"columns":["a"],"rows":[[1],["x"]]}}}"#;
        assert!(serde_json::from_str::<Database>(bad).is_err());
        let ragged = r#"{"tables":{"t":{"columns":["a"],"rows":[[1, 2]]}}}"#;
        assert!(serde_json::from_str::<Database>(ragged).is_err());
        let null = r#"{"tables":{"t":{"columns":["a"],"rows":[[null]]}}}"#;
        assert!(serde_json::from_str::<Database>(null).is_err());
    }

    #[test]
    fn text_rows_infer_types() {
        let t = Table::from_text_rows(
            "t",
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec!["1".into(), "1.5".into(), "true".into(), "x".into()],
                vec!["2".into(), "3".into(), "FALSE".into(), "7".into()],
            ],
        )
        .unwrap();
        let types: Vec<_> = t.columns.iter().map(|c| c.ty).collect();
        assert_eq!(
            types,
            vec![ColumnType::Int, ColumnType::Real, ColumnType::Bool, ColumnType::Text]
        );
        assert_eq!(t.rows[1][3], Value::Text("7".into()));
    }
}
