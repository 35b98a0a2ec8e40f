//! Weighted tree edit distance between queries, exact match and evaluation
//! reports.

mod costs;
mod report;
mod tree;
mod zhang_shasha;

use thiserror::Error;

use crate::grammar::{serialize, SqlAst};

pub use costs::{ClassCost, CostConfig, CostError};
pub use report::{aggregate_report, aggregate_report_with_db, Averages, EvalReport, EvalRow, TemplateStats};
pub use tree::{encode, NodeClass, Tree};
pub use zhang_shasha::tree_distance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TedError {
    #[error("no rows to report on")]
    EmptyInput,
    #[error("latency must be finite and non-negative, got {0}")]
    InvalidLatency(f64),
    #[error(transparent)]
    Costs(#[from] CostError),
}

/// Edit distance between the tree encodings of two queries.
pub fn ted(gold: &SqlAst, pred: &SqlAst, costs: &CostConfig) -> f64 {
    tree_distance(&encode(gold), &encode(pred), costs)
}

/// Canonical serializations are identical.
pub fn exact_match(gold: &SqlAst, pred: &SqlAst) -> bool {
    serialize(gold) == serialize(pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse;

    fn d(a: &str, b: &str) -> f64 {
        ted(&parse(a).unwrap(), &parse(b).unwrap(), &CostConfig::default())
    }

    #[test]
    fn weighting() {
        assert_eq!(d("SELECT a FROM t", "SELECT a FROM t"), 0.0);
        assert_eq!(d("SELECT a FROM t", "SELECT b FROM t"), 1.0);
        assert_eq!(d("SELECT a FROM t", "SELECT a FROM u"), 3.0);
    }

    #[test]
    fn exact_match_is_canonical() {
        let a = parse("select * from User").unwrap();
        let b = parse("SELECT *   FROM User").unwrap();
        assert!(exact_match(&a, &b));
        assert!(!exact_match(&a, &parse("SELECT x FROM User").unwrap()));
    }
}
