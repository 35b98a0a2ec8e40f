//! Canonical text rendering.
//!
//! Keywords are uppercase, tokens are separated by single spaces and clauses
//! appear in SELECT / FROM / JOIN / WHERE / GROUP BY / ORDER BY / LIMIT order.
//! The same writer renders templates by swapping identifiers and literals for
//! placeholders.

use std::fmt::{self, Write};

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Style {
    Canonical,
    Template,
}

pub const TABLE_PLACEHOLDER: &str = "[TABLE]";
pub const COLUMN_PLACEHOLDER: &str = "[COL]";
pub const VALUE_PLACEHOLDER: &str = "[VAL]";

/// Renders `ast` as canonical SQL text.
pub fn serialize(ast: &SqlAst) -> String {
    render(ast, Style::Canonical)
}

pub(crate) fn render(ast: &SqlAst, style: Style) -> String {
    let mut out = String::new();
    Writer { out: &mut out, style }
        .query(ast)
        .expect("writing to a String cannot fail");
    out
}

impl fmt::Display for SqlAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            Some(t) => write!(f, "{t}.{}", self.column),
            None => f.write_str(&self.column),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arg {
            AggArg::Star => write!(f, "{}(*)", self.func.as_str()),
            AggArg::Column(c) => write!(f, "{}({c})", self.func.as_str()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Real(x) => f.write_str(&format_real(*x)),
            Literal::Text(s) => write!(f, "'{}'", s.replace('\'', "''")),
            Literal::Bool(true) => f.write_str("TRUE"),
            Literal::Bool(false) => f.write_str("FALSE"),
        }
    }
}

/// Shortest round-tripping decimal text that always contains a '.', so it
/// re-parses as a real and not an integer.
pub fn format_real(x: f64) -> String {
    let s = x.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

struct Writer<'a> {
    out: &'a mut String,
    style: Style,
}

impl Writer<'_> {
    fn query(&mut self, ast: &SqlAst) -> fmt::Result {
        self.out.push_str("SELECT ");
        for (i, item) in ast.select_items.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            match item {
                SelectItem::Star => self.out.push('*'),
                SelectItem::Column(c) => self.column(c)?,
                SelectItem::Aggregate(a) => self.aggregate(a)?,
            }
        }
        self.out.push_str(" FROM ");
        self.table(&ast.from_table);
        for j in &ast.joins {
            self.out.push_str(" JOIN ");
            self.table(&j.table);
            self.out.push_str(" ON ");
            self.column(&j.left)?;
            self.out.push_str(" = ");
            self.column(&j.right)?;
        }
        if let Some(cond) = &ast.where_clause {
            self.out.push_str(" WHERE ");
            self.condition(cond)?;
        }
        if !ast.group_by.is_empty() {
            self.out.push_str(" GROUP BY ");
            for (i, c) in ast.group_by.iter().enumerate() {
                if i > 0 {
                    self.out.push_str(", ");
                }
                self.column(c)?;
            }
        }
        if !ast.order_by.is_empty() {
            self.out.push_str(" ORDER BY ");
            for (i, item) in ast.order_by.iter().enumerate() {
                if i > 0 {
                    self.out.push_str(", ");
                }
                match &item.key {
                    OrderKey::Column(c) => self.column(c)?,
                    OrderKey::Aggregate(a) => self.aggregate(a)?,
                }
                self.out.push(' ');
                self.out.push_str(item.direction.as_str());
            }
        }
        if let Some(n) = ast.limit {
            self.out.push_str(" LIMIT ");
            match self.style {
                Style::Canonical => write!(self.out, "{n}")?,
                Style::Template => self.out.push_str(VALUE_PLACEHOLDER),
            }
        }
        Ok(())
    }

    fn table(&mut self, name: &str) {
        match self.style {
            Style::Canonical => self.out.push_str(name),
            Style::Template => self.out.push_str(TABLE_PLACEHOLDER),
        }
    }

    fn column(&mut self, c: &ColumnRef) -> fmt::Result {
        match self.style {
            Style::Canonical => write!(self.out, "{c}"),
            Style::Template => {
                self.out.push_str(COLUMN_PLACEHOLDER);
                Ok(())
            }
        }
    }

    fn aggregate(&mut self, a: &Aggregate) -> fmt::Result {
        self.out.push_str(a.func.as_str());
        self.out.push('(');
        match &a.arg {
            AggArg::Star => self.out.push('*'),
            AggArg::Column(c) => self.column(c)?,
        }
        self.out.push(')');
        Ok(())
    }

    fn literal(&mut self, l: &Literal) -> fmt::Result {
        match self.style {
            Style::Canonical => write!(self.out, "{l}"),
            Style::Template => {
                self.out.push_str(VALUE_PLACEHOLDER);
                Ok(())
            }
        }
    }

    fn condition(&mut self, cond: &Condition) -> fmt::Result {
        match cond {
            Condition::Cmp(cmp) => {
                self.column(&cmp.left)?;
                self.out.push(' ');
                self.out.push_str(cmp.op.as_str());
                self.out.push(' ');
                match &cmp.right {
                    Operand::Column(c) => self.column(c),
                    Operand::Literal(l) => self.literal(l),
                }
            }
            Condition::And(l, r) => {
                self.operand(l, matches!(**l, Condition::Or(..)))?;
                self.out.push_str(" AND ");
                self.operand(r, !matches!(**r, Condition::Cmp(_)))
            }
            Condition::Or(l, r) => {
                self.operand(l, false)?;
                self.out.push_str(" OR ");
                self.operand(r, matches!(**r, Condition::Or(..)))
            }
        }
    }

    fn operand(&mut self, cond: &Condition, parens: bool) -> fmt::Result {
        if parens {
            self.out.push('(');
        }
        self.condition(cond)?;
        if parens {
            self.out.push(')');
        }
        Ok(())
    }
}
