//! Typed syntax tree for the supported single-block SELECT subset.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    pub column: String,
}

impl ColumnRef {
    pub fn bare(column: impl Into<String>) -> Self {
        ColumnRef {
            table: None,
            column: column.into(),
        }
    }

    pub fn qualified(table: impl Into<String>, column: impl Into<String>) -> Self {
        ColumnRef {
            table: Some(table.into()),
            column: column.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AggFunc {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggFunc {
    pub const ALL: [AggFunc; 5] = [AggFunc::Count, AggFunc::Sum, AggFunc::Avg, AggFunc::Min, AggFunc::Max];

    pub fn as_str(self) -> &'static str {
        match self {
            AggFunc::Count => "COUNT",
            AggFunc::Sum => "SUM",
            AggFunc::Avg => "AVG",
            AggFunc::Min => "MIN",
            AggFunc::Max => "MAX",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggArg {
    Star,
    Column(ColumnRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aggregate {
    pub func: AggFunc,
    pub arg: AggArg,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectItem {
    Star,
    Column(ColumnRef),
    Aggregate(Aggregate),
}

/// `JOIN table ON left = right`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Join {
    pub table: String,
    pub left: ColumnRef,
    pub right: ColumnRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<>")]
    NotEq,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    LtEq,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    GtEq,
    #[serde(rename = "LIKE")]
    Like,
}

impl CmpOp {
    pub const ALL: [CmpOp; 7] = [
        CmpOp::Eq,
        CmpOp::NotEq,
        CmpOp::Lt,
        CmpOp::LtEq,
        CmpOp::Gt,
        CmpOp::GtEq,
        CmpOp::Like,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::NotEq => "<>",
            CmpOp::Lt => "<",
            CmpOp::LtEq => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtEq => ">=",
            CmpOp::Like => "LIKE",
        }
    }
}

/// Literal values. `Real` must be finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Literal {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Column(ColumnRef),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub left: ColumnRef,
    pub op: CmpOp,
    pub right: Operand,
}

/// Boolean condition tree. Parsing is left-associative with AND binding
/// tighter than OR; the serializer inserts the parentheses needed to
/// reproduce any shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Cmp(Comparison),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn and(l: Condition, r: Condition) -> Condition {
        Condition::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Condition, r: Condition) -> Condition {
        Condition::Or(Box::new(l), Box::new(r))
    }

    /// Comparisons in left-to-right order.
    pub fn comparisons(&self) -> Vec<&Comparison> {
        let mut out = Vec::new();
        self.collect_comparisons(&mut out);
        out
    }

    fn collect_comparisons<'a>(&'a self, out: &mut Vec<&'a Comparison>) {
        match self {
            Condition::Cmp(c) => out.push(c),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.collect_comparisons(out);
                r.collect_comparisons(out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    #[default]
    Asc,
    Desc,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Asc => "ASC",
            Direction::Desc => "DESC",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKey {
    Column(ColumnRef),
    Aggregate(Aggregate),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderItem {
    pub key: OrderKey,
    pub direction: Direction,
}

/// A parsed query.
///
/// Invariants: `select_items` is nonempty, identifiers are bare
/// non-reserved names, real literals are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqlAst {
    pub select_items: Vec<SelectItem>,
    pub from_table: String,
    #[serde(default)]
    pub joins: Vec<Join>,
    #[serde(default)]
    pub where_clause: Option<Condition>,
    #[serde(default)]
    pub group_by: Vec<ColumnRef>,
    #[serde(default)]
    pub order_by: Vec<OrderItem>,
    #[serde(default)]
    pub limit: Option<u64>,
}

impl SqlAst {
    /// `SELECT <items> FROM <table>` with no other clauses.
    pub fn simple(select_items: Vec<SelectItem>, from_table: impl Into<String>) -> Self {
        SqlAst {
            select_items,
            from_table: from_table.into(),
            joins: Vec::new(),
            where_clause: None,
            group_by: Vec::new(),
            order_by: Vec::new(),
            limit: None,
        }
    }

    /// Tables named in FROM and JOIN, in order of appearance.
    pub fn tables(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.from_table.as_str()).chain(self.joins.iter().map(|j| j.table.as_str()))
    }

    /// Every column reference in clause order: SELECT, JOIN ON, WHERE, GROUP BY, ORDER BY.
    pub fn column_refs(&self) -> Vec<&ColumnRef> {
        let mut out = Vec::new();
        for item in &self.select_items {
            match item {
                SelectItem::Star => {}
                SelectItem::Column(c) => out.push(c),
                SelectItem::Aggregate(a) => {
                    if let AggArg::Column(c) = &a.arg {
                        out.push(c)
                    }
                }
            }
        }
        for j in &self.joins {
            out.push(&j.left);
            out.push(&j.right);
        }
        if let Some(cond) = &self.where_clause {
            for cmp in cond.comparisons() {
                out.push(&cmp.left);
                if let Operand::Column(c) = &cmp.right {
                    out.push(c);
                }
            }
        }
        out.extend(self.group_by.iter());
        for item in &self.order_by {
            match &item.key {
                OrderKey::Column(c) => out.push(c),
                OrderKey::Aggregate(a) => {
                    if let AggArg::Column(c) = &a.arg {
                        out.push(c)
                    }
                }
            }
        }
        out
    }

    /// Aggregates appearing in the select list.
    pub fn select_aggregates(&self) -> impl Iterator<Item = &Aggregate> {
        self.select_items.iter().filter_map(|i| match i {
            SelectItem::Aggregate(a) => Some(a),
            _ => None,
        })
    }
}
