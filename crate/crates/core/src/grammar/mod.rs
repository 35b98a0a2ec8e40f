//! SQL subset: syntax tree, parser, canonical serializer and schema rules.

mod ast;
mod display;
pub mod keywords;
mod lexer;
mod parser;
mod schema;
mod validate;

use thiserror::Error;

pub use ast::*;
pub use display::{format_real, serialize, COLUMN_PLACEHOLDER, TABLE_PLACEHOLDER, VALUE_PLACEHOLDER};
pub(crate) use display::{render, Style};
pub use parser::parse;
pub use schema::{ColumnDef, ColumnNameId, ColumnType, DataModelSchema, SchemaError, SchemaIndex, TableDef, TableId};
pub use validate::{validate_against_schema, validate_with_index, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported feature at byte {offset}: {feature}")]
    Unsupported { offset: usize, feature: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Unsupported { offset, .. } => *offset,
        }
    }
}

/// Human-readable EBNF of the accepted language.
pub const EBNF: &str = r#"query      = "SELECT" item { "," item } "FROM" table { join }
             [ "WHERE" cond ]
             [ "GROUP" "BY" colref { "," colref } ]
             [ "ORDER" "BY" order { "," order } ]
             [ "LIMIT" uint ] ;
item       = "*" | aggregate | colref ;
aggregate  = ( "COUNT" | "SUM" | "AVG" | "MIN" | "MAX" ) "(" ( "*" | colref ) ")" ;
join       = [ "INNER" ] "JOIN" table "ON" colref "=" colref ;
cond       = conj { "OR" conj } ;
conj       = atom { "AND" atom } ;
atom       = "(" cond ")" | colref op ( literal | colref ) ;
op         = "=" | "<>" | "<" | "<=" | ">" | ">=" | "LIKE" ;
order      = ( aggregate | colref ) [ "ASC" | "DESC" ] ;
colref     = ident [ "." ident ] ;
table      = ident ;
literal    = int | decimal | string | "TRUE" | "FALSE" ;
int        = [ "-" ] digit { digit } ;
decimal    = int "." digit { digit } ;
uint       = digit { digit } ;
string     = "'" { char | "''" } "'" ;
ident      = ( letter | "_" ) { letter | digit | "_" } ;   (* not a reserved word *)

(* Keywords are case-insensitive. Identifiers must name schema tables and
   columns: every table exists, every column belongs to a FROM/JOIN table and
   unqualified columns resolve to exactly one of them. *)
"#;
