//! Query evaluation: nested-loop joins, filtering, grouping, ordering.

use std::cmp::Ordering;

use crate::grammar::{
    validate_against_schema, AggArg, AggFunc, Aggregate, CmpOp, ColumnRef, ColumnType, Comparison, Condition,
    Direction, Operand, OrderKey, SelectItem, SqlAst,
};

use super::database::{Database, Relation, Table};
use super::value::{like_match, Value};
use super::ExecError;

/// Position of a column in the joined row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    /// Index of the FROM/JOIN occurrence.
    occurrence: usize,
    /// Offset into the joined row.
    offset: usize,
    ty: ColumnType,
}

struct Scope<'a> {
    tables: Vec<&'a Table>,
    offsets: Vec<usize>,
}

impl<'a> Scope<'a> {
    fn new(ast: &SqlAst, db: &'a Database) -> Self {
        let tables: Vec<&Table> = ast.tables().map(|name| db.table(name).expect("validated")).collect();
        let mut offsets = Vec::with_capacity(tables.len());
        let mut at = 0;
        for t in &tables {
            offsets.push(at);
            at += t.columns.len();
        }
        Scope { tables, offsets }
    }

    /// First occurrence that binds `col`.
    fn resolve(&self, col: &ColumnRef) -> Slot {
        for (occ, t) in self.tables.iter().enumerate() {
            if let Some(q) = &col.table {
                if !t.name.eq_ignore_ascii_case(q) {
                    continue;
                }
            }
            if let Some(i) = t.columns.iter().position(|c| c.name.eq_ignore_ascii_case(&col.column)) {
                return Slot {
                    occurrence: occ,
                    offset: self.offsets[occ] + i,
                    ty: t.columns[i].ty,
                };
            }
        }
        unreachable!("column {col} passed validation but is not bound")
    }
}

fn numeric(ty: ColumnType) -> bool {
    matches!(ty, ColumnType::Int | ColumnType::Real)
}

fn comparable(a: ColumnType, b: ColumnType) -> bool {
    a == b || (numeric(a) && numeric(b))
}

fn literal_type(v: &Value) -> ColumnType {
    v.column_type().expect("literals are never null")
}

fn type_error(msg: String) -> ExecError {
    ExecError::TypeError(msg)
}

enum Rhs {
    Slot(Slot),
    Value(Value),
}

struct CompiledCmp {
    left: Slot,
    op: CmpOp,
    right: Rhs,
}

enum Cond {
    Cmp(CompiledCmp),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

fn compile_cond(cond: &Condition, scope: &Scope<'_>) -> Result<Cond, ExecError> {
    Ok(match cond {
        Condition::Cmp(c) => Cond::Cmp(compile_cmp(c, scope)?),
        Condition::And(l, r) => Cond::And(Box::new(compile_cond(l, scope)?), Box::new(compile_cond(r, scope)?)),
        Condition::Or(l, r) => Cond::Or(Box::new(compile_cond(l, scope)?), Box::new(compile_cond(r, scope)?)),
    })
}

fn compile_cmp(c: &Comparison, scope: &Scope<'_>) -> Result<CompiledCmp, ExecError> {
    let left = scope.resolve(&c.left);
    let (right, rty) = match &c.right {
        Operand::Column(col) => {
            let s = scope.resolve(col);
            (Rhs::Slot(s), s.ty)
        }
        Operand::Literal(l) => {
            let v = Value::from(l);
            let ty = literal_type(&v);
            (Rhs::Value(v), ty)
        }
    };
    let ok = match c.op {
        CmpOp::Like => left.ty == ColumnType::Text && rty == ColumnType::Text,
        _ => comparable(left.ty, rty),
    };
    if !ok {
        return Err(type_error(format!(
            "cannot compare {} ({}) {} {}",
            c.left,
            left.ty,
            c.op.as_str(),
            rty
        )));
    }
    Ok(CompiledCmp { left, op: c.op, right })
}

fn eval_cmp(c: &CompiledCmp, row: &[Value]) -> bool {
    let l = &row[c.left.offset];
    let r = match &c.right {
        Rhs::Slot(s) => &row[s.offset],
        Rhs::Value(v) => v,
    };
    if c.op == CmpOp::Like {
        return matches!((l, r), (Value::Text(t), Value::Text(p)) if like_match(t, p));
    }
    let ord = l.total_cmp(r);
    match c.op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::NotEq => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::LtEq => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::GtEq => ord != Ordering::Less,
        CmpOp::Like => unreachable!(),
    }
}

fn eval_cond(c: &Cond, row: &[Value]) -> bool {
    match c {
        Cond::Cmp(c) => eval_cmp(c, row),
        Cond::And(l, r) => eval_cond(l, row) && eval_cond(r, row),
        Cond::Or(l, r) => eval_cond(l, row) || eval_cond(r, row),
    }
}

#[derive(Clone)]
enum Expr {
    Slot(Slot),
    Agg(AggFunc, Option<Slot>),
}

fn compile_agg(a: &Aggregate, scope: &Scope<'_>) -> Result<Expr, ExecError> {
    let slot = match &a.arg {
        AggArg::Star if a.func == AggFunc::Count => None,
        AggArg::Star => {
            return Err(type_error(format!("{}(*) needs a column", a.func.as_str())));
        }
        AggArg::Column(c) => Some(scope.resolve(c)),
    };
    if let (AggFunc::Sum | AggFunc::Avg, Some(s)) = (a.func, slot) {
        if !numeric(s.ty) {
            return Err(type_error(format!("{a} over a {} column", s.ty)));
        }
    }
    Ok(Expr::Agg(a.func, slot))
}

fn aggregate(func: AggFunc, slot: Option<Slot>, rows: &[&[Value]]) -> Result<Value, ExecError> {
    let values = || rows.iter().map(move |r| &r[slot.expect("column aggregate").offset]);
    Ok(match func {
        AggFunc::Count => Value::Int(rows.len() as i64),
        AggFunc::Sum => match slot.map(|s| s.ty) {
            Some(ColumnType::Int) => {
                let mut total: i64 = 0;
                for v in values() {
                    if let Value::Int(n) = v {
                        total = total.checked_add(*n).ok_or(ExecError::Overflow)?;
                    }
                }
                Value::Int(total)
            }
            _ => Value::Real(values().filter_map(Value::as_f64).sum()),
        },
        AggFunc::Avg => {
            if rows.is_empty() {
                Value::Null
            } else {
                let sum: f64 = values().filter_map(Value::as_f64).sum();
                Value::Real(sum / rows.len() as f64)
            }
        }
        AggFunc::Min => values().min_by(|a, b| a.total_cmp(b)).cloned().unwrap_or(Value::Null),
        AggFunc::Max => values().max_by(|a, b| a.total_cmp(b)).cloned().unwrap_or(Value::Null),
    })
}

fn eval_expr(e: &Expr, group: &[&[Value]]) -> Result<Value, ExecError> {
    match e {
        Expr::Slot(s) => Ok(group[0][s.offset].clone()),
        Expr::Agg(f, s) => aggregate(*f, *s, group),
    }
}

/// Evaluates `ast` over `db`.
pub fn execute(ast: &SqlAst, db: &Database) -> Result<Relation, ExecError> {
    let violations = validate_against_schema(ast, db.schema());
    if !violations.is_empty() {
        return Err(ExecError::SchemaMismatch(violations));
    }
    let scope = Scope::new(ast, db);

    // Compile and type-check everything before touching rows.
    let mut joins = Vec::new();
    for j in &ast.joins {
        let cmp = Comparison {
            left: j.left.clone(),
            op: CmpOp::Eq,
            right: Operand::Column(j.right.clone()),
        };
        let c = compile_cmp(&cmp, &scope)?;
        let needs = match &c.right {
            Rhs::Slot(s) => s.occurrence.max(c.left.occurrence),
            Rhs::Value(_) => c.left.occurrence,
        };
        joins.push((needs, c));
    }
    let filter = ast.where_clause.as_ref().map(|c| compile_cond(c, &scope)).transpose()?;

    let grouped = !ast.group_by.is_empty()
        || ast.select_aggregates().next().is_some()
        || ast.order_by.iter().any(|o| matches!(o.key, OrderKey::Aggregate(_)));
    let group_slots: Vec<Slot> = ast.group_by.iter().map(|c| scope.resolve(c)).collect();
    let check_grouped = |c: &ColumnRef, what: &str| -> Result<Slot, ExecError> {
        let s = scope.resolve(c);
        if grouped && !group_slots.contains(&s) {
            return Err(ExecError::InvalidGrouping(format!(
                "{what} {c} is neither aggregated nor in GROUP BY"
            )));
        }
        Ok(s)
    };

    let mut columns = Vec::new();
    let mut exprs = Vec::new();
    for item in &ast.select_items {
        match item {
            SelectItem::Star => {
                if grouped {
                    return Err(ExecError::InvalidGrouping("SELECT * in an aggregate query".into()));
                }
                for (occ, t) in scope.tables.iter().enumerate() {
                    for (i, c) in t.columns.iter().enumerate() {
                        columns.push(c.name.clone());
                        exprs.push(Expr::Slot(Slot {
                            occurrence: occ,
                            offset: scope.offsets[occ] + i,
                            ty: c.ty,
                        }));
                    }
                }
            }
            SelectItem::Column(c) => {
                columns.push(c.to_string());
                exprs.push(Expr::Slot(check_grouped(c, "selected column")?));
            }
            SelectItem::Aggregate(a) => {
                columns.push(a.to_string());
                exprs.push(compile_agg(a, &scope)?);
            }
        }
    }
    let mut order = Vec::new();
    for item in &ast.order_by {
        let e = match &item.key {
            OrderKey::Column(c) => Expr::Slot(check_grouped(c, "ORDER BY column")?),
            OrderKey::Aggregate(a) => compile_agg(a, &scope)?,
        };
        order.push((e, item.direction));
    }

    // Nested-loop join; each ON condition applies once its tables are bound.
    let mut rows: Vec<Vec<Value>> = scope.tables[0].rows.clone();
    for (occ, t) in scope.tables.iter().enumerate().skip(1) {
        let mut next = Vec::new();
        for r in &rows {
            for s in &t.rows {
                let mut joined = r.clone();
                joined.extend(s.iter().cloned());
                next.push(joined);
            }
        }
        rows = next;
        for (_, c) in joins.iter().filter(|(needs, _)| *needs == occ) {
            rows.retain(|r| eval_cmp(c, r));
        }
    }
    // Conditions referring only to the FROM table.
    for (_, c) in joins.iter().filter(|(needs, _)| *needs == 0) {
        rows.retain(|r| eval_cmp(c, r));
    }
    if let Some(f) = &filter {
        rows.retain(|r| eval_cond(f, r));
    }

    // Each output row carries its ORDER BY keys.
    let mut output: Vec<(Vec<Value>, Vec<Value>)> = Vec::new();
    if grouped {
        let mut groups: Vec<(Vec<Value>, Vec<&[Value]>)> = Vec::new();
        for r in &rows {
            let key: Vec<Value> = group_slots.iter().map(|s| r[s.offset].clone()).collect();
            match groups
                .iter_mut()
                .find(|(k, _)| k.iter().zip(&key).all(|(a, b)| a.total_cmp(b) == Ordering::Equal))
            {
                Some((_, members)) => members.push(r),
                None => groups.push((key, vec![r])),
            }
        }
        if group_slots.is_empty() && groups.is_empty() {
            groups.push((Vec::new(), Vec::new()));
        }
        for (_, members) in &groups {
            let row = exprs.iter().map(|e| eval_expr(e, members)).collect::<Result<_, _>>()?;
            let keys = order
                .iter()
                .map(|(e, _)| eval_expr(e, members))
                .collect::<Result<_, _>>()?;
            output.push((row, keys));
        }
    } else {
        for r in &rows {
            let one: [&[Value]; 1] = [r];
            let row = exprs.iter().map(|e| eval_expr(e, &one)).collect::<Result<_, _>>()?;
            let keys = order
                .iter()
                .map(|(e, _)| eval_expr(e, &one))
                .collect::<Result<_, _>>()?;
            output.push((row, keys));
        }
    }

    output.sort_by(|(_, a), (_, b)| {
        for ((x, y), (_, dir)) in a.iter().zip(b).zip(&order) {
            let o = x.total_cmp(y);
            let o = if *dir == Direction::Desc { o.reverse() } else { o };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });
    if let Some(n) = ast.limit {
        output.truncate(usize::try_from(n).unwrap_or(usize::MAX));
    }
    Ok(Relation {
        columns,
        rows: output.into_iter().map(|(r, _)| r).collect(),
    })
}

fn rows_equal(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.total_cmp(y) == Ordering::Equal)
}

fn row_cmp(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Same result rows: in order when `gold` has ORDER BY, as multisets
/// otherwise. Column positions always matter; column names do not.
pub fn execution_match(gold: &SqlAst, pred: &SqlAst, db: &Database) -> Result<bool, ExecError> {
    let g = execute(gold, db)?;
    let p = execute(pred, db)?;
    if g.rows.len() != p.rows.len() {
        return Ok(false);
    }
    if gold.order_by.is_empty() {
        let mut gr: Vec<&Vec<Value>> = g.rows.iter().collect();
        let mut pr: Vec<&Vec<Value>> = p.rows.iter().collect();
        gr.sort_by(|a, b| row_cmp(a, b));
        pr.sort_by(|a, b| row_cmp(a, b));
        Ok(gr.iter().zip(&pr).all(|(a, b)| rows_equal(a, b)))
    } else {
        Ok(g.rows.iter().zip(&p.rows).all(|(a, b)| rows_equal(a, b)))
    }
}
