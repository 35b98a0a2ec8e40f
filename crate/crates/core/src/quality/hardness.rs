use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grammar::{OrderKey, SqlAst};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hardness {
    Easy,
    Medium,
    Hard,
    Extra,
}

impl Hardness {
    /// 1 (Easy) to 4 (Extra).
    pub fn code(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for Hardness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Number of aggregates in the select list and ORDER BY.
fn aggregate_count(ast: &SqlAst) -> usize {
    ast.select_aggregates().count()
        + ast
            .order_by
            .iter()
            .filter(|o| matches!(o.key, OrderKey::Aggregate(_)))
            .count()
}

/// Component count: joins, a multi-comparison WHERE, GROUP BY, ORDER BY,
/// LIMIT, and each aggregate after the first.
pub fn component_count(ast: &SqlAst) -> usize {
    let comparisons = ast.where_clause.as_ref().map_or(0, |w| w.comparisons().len());
    ast.joins.len()
        + usize::from(comparisons >= 2)
        + usize::from(!ast.group_by.is_empty())
        + usize::from(!ast.order_by.is_empty())
        + usize::from(ast.limit.is_some())
        + aggregate_count(ast).saturating_sub(1)
}

pub fn hardness(ast: &SqlAst) -> Hardness {
    let c = component_count(ast);
    let comparisons = ast.where_clause.as_ref().map_or(0, |w| w.comparisons().len());
    let simple = ast.joins.is_empty() && aggregate_count(ast) <= 1 && comparisons <= 1;
    match c {
        _ if c == 0 || simple => Hardness::Easy,
        1..=2 => Hardness::Medium,
        3..=4 => Hardness::Hard,
        _ => Hardness::Extra,
    }
}
