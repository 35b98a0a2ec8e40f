use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tree::{NodeClass, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCost {
    pub insert: f64,
    pub delete: f64,
    pub relabel: f64,
}

impl ClassCost {
    pub const fn uniform(c: f64) -> Self {
        ClassCost {
            insert: c,
            delete: c,
            relabel: c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cost {field} of class {class} must be finite and non-negative, got {value}")]
pub struct CostError {
    pub class: &'static str,
    pub field: &'static str,
    pub value: f64,
}

/// Edit costs per node class. Tables weigh more than columns so that picking
/// the wrong table costs more than picking the wrong column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub table: ClassCost,
    pub column: ClassCost,
    pub literal: ClassCost,
    pub operator: ClassCost,
    pub aggregate: ClassCost,
    pub clause: ClassCost,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            table: ClassCost::uniform(3.0),
            column: ClassCost::uniform(1.0),
            literal: ClassCost::uniform(1.0),
            operator: ClassCost::uniform(1.0),
            aggregate: ClassCost::uniform(1.0),
            clause: ClassCost::uniform(2.0),
        }
    }
}

impl CostConfig {
    pub fn class(&self, class: NodeClass) -> &ClassCost {
        match class {
            NodeClass::Table => &self.table,
            NodeClass::Column => &self.column,
            NodeClass::Literal => &self.literal,
            NodeClass::Operator => &self.operator,
            NodeClass::Aggregate => &self.aggregate,
            NodeClass::Clause => &self.clause,
        }
    }

    pub fn validate(&self) -> Result<(), CostError> {
        let classes = [
            ("table", self.table),
            ("column", self.column),
            ("literal", self.literal),
            ("operator", self.operator),
            ("aggregate", self.aggregate),
            ("clause", self.clause),
        ];
        for (class, c) in classes {
            for (field, value) in [("insert", c.insert), ("delete", c.delete), ("relabel", c.relabel)] {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(CostError { class, field, value });
                }
            }
        }
        Ok(())
    }

    pub fn insert(&self, node: &Tree) -> f64 {
        self.class(node.class).insert
    }

    pub fn delete(&self, node: &Tree) -> f64 {
        self.class(node.class).delete
    }

    /// Zero for identical nodes; the class relabel cost within a class; the
    /// larger of the two relabel costs across classes.
    pub fn relabel(&self, a: &Tree, b: &Tree) -> f64 {
        if a.class == b.class {
            if a.label == b.label {
                0.0
            } else {
                self.class(a.class).relabel
            }
        } else {
            self.class(a.class).relabel.max(self.class(b.class).relabel)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_partial_override() {
        let c: CostConfig = serde_json::from_str(r#"{"column":{"insert":2,"delete":2,"relabel":0.5}}"#).unwrap();
        assert_eq!(c.column.relabel, 0.5);
        assert_eq!(c.table, ClassCost::uniform(3.0));
        assert!(serde_json::from_str::<CostConfig>(r#"{"colunm":{}}"#).is_err());
        let bad = CostConfig {
            literal: ClassCost::uniform(-1.0),
            ..CostConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
