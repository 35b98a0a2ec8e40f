//! Labeled ordered trees and the AST encoding.

use serde::{Deserialize, Serialize};

use crate::grammar::{AggArg, Aggregate, ColumnRef, Condition, Literal, Operand, OrderKey, SelectItem, SqlAst};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Table,
    Column,
    Literal,
    Operator,
    Aggregate,
    Clause,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    pub label: String,
    pub class: NodeClass,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(class: NodeClass, label: impl Into<String>) -> Self {
        Tree {
            label: label.into(),
            class,
            children: Vec::new(),
        }
    }

    pub fn node(class: NodeClass, label: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            label: label.into(),
            class,
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

fn clause(label: &str, children: Vec<Tree>) -> Tree {
    Tree::node(NodeClass::Clause, label, children)
}

fn column(c: &ColumnRef) -> Tree {
    let children = c
        .table
        .iter()
        .map(|t| Tree::leaf(NodeClass::Table, t.as_str()))
        .collect();
    Tree::node(NodeClass::Column, c.column.as_str(), children)
}

fn aggregate(a: &Aggregate) -> Tree {
    let arg = match &a.arg {
        AggArg::Star => Tree::leaf(NodeClass::Column, "*"),
        AggArg::Column(c) => column(c),
    };
    Tree::node(NodeClass::Aggregate, a.func.as_str(), vec![arg])
}

fn literal(l: &Literal) -> Tree {
    Tree::leaf(NodeClass::Literal, l.to_string())
}

fn condition(c: &Condition) -> Tree {
    match c {
        Condition::Cmp(cmp) => {
            let right = match &cmp.right {
                Operand::Column(col) => column(col),
                Operand::Literal(l) => literal(l),
            };
            Tree::node(NodeClass::Operator, cmp.op.as_str(), vec![column(&cmp.left), right])
        }
        Condition::And(l, r) => Tree::node(NodeClass::Operator, "AND", vec![condition(l), condition(r)]),
        Condition::Or(l, r) => Tree::node(NodeClass::Operator, "OR", vec![condition(l), condition(r)]),
    }
}

/// Encodes `ast` as a tree rooted at a `query` clause node with one child per
/// present clause. Identifiers and literals keep their exact text, so two
/// ASTs encode equally iff they serialize equally.
pub fn encode(ast: &SqlAst) -> Tree {
    let mut clauses = Vec::new();
    let items = ast
        .select_items
        .iter()
        .map(|i| match i {
            SelectItem::Star => Tree::leaf(NodeClass::Column, "*"),
            SelectItem::Column(c) => column(c),
            SelectItem::Aggregate(a) => aggregate(a),
        })
        .collect();
    clauses.push(clause("SELECT", items));

    let mut from = vec![Tree::leaf(NodeClass::Table, ast.from_table.as_str())];
    for j in &ast.joins {
        from.push(clause(
            "JOIN",
            vec![
                Tree::leaf(NodeClass::Table, j.table.as_str()),
                Tree::node(NodeClass::Operator, "=", vec![column(&j.left), column(&j.right)]),
            ],
        ));
    }
    clauses.push(clause("FROM", from));

    if let Some(w) = &ast.where_clause {
        clauses.push(clause("WHERE", vec![condition(w)]));
    }
    if !ast.group_by.is_empty() {
        clauses.push(clause("GROUP BY", ast.group_by.iter().map(column).collect()));
    }
    if !ast.order_by.is_empty() {
        let items = ast
            .order_by
            .iter()
            .map(|o| {
                let key = match &o.key {
                    OrderKey::Column(c) => column(c),
                    OrderKey::Aggregate(a) => aggregate(a),
                };
                Tree::node(NodeClass::Operator, o.direction.as_str(), vec![key])
            })
            .collect();
        clauses.push(clause("ORDER BY", items));
    }
    if let Some(n) = ast.limit {
        clauses.push(clause("LIMIT", vec![Tree::leaf(NodeClass::Literal, n.to_string())]));
    }
    clause("query", clauses)
}
