//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use nl2sql_forge::decoding::Vocabulary;
use nl2sql_forge::exec::{Database, Table, Value};
use nl2sql_forge::grammar::{
    AggArg, AggFunc, Aggregate, CmpOp, ColumnDef, ColumnRef, ColumnType, Comparison, Condition, DataModelSchema,
    Direction, Join, Literal, Operand, OrderItem, OrderKey, SelectItem, SqlAst, TableDef,
};
use nl2sql_forge::ted::{CostConfig, NodeClass, Tree};

// Several names share prefixes with keywords or with each other on purpose.
pub const TABLE_NAMES: &[&str] = &[
    "User",
    "Account",
    "orders",
    "cars_data",
    "t",
    "item",
    "sel",
    "fromage",
    "x1",
    "ab",
];
pub const COLUMN_NAMES: &[&str] = &[
    "id",
    "country",
    "name",
    "user_id",
    "cylinders",
    "price",
    "a",
    "b",
    "selected",
    "ord",
    "asc_col",
    "limit_n",
];
const TEXT_VALUES: &[&str] = &["x", "abc", "US", "PT", "a_c", "Zed"];
const LIKE_PATTERNS: &[&str] = &["%", "a%", "%c", "_b_", "U_", "x"];

const TYPES: [ColumnType; 4] = [ColumnType::Int, ColumnType::Real, ColumnType::Text, ColumnType::Bool];

pub fn random_schema<R: Rng>(rng: &mut R, max_tables: usize, max_columns: usize) -> DataModelSchema {
    let n = rng.gen_range(1..=max_tables.min(TABLE_NAMES.len()));
    let tables = TABLE_NAMES
        .choose_multiple(rng, n)
        .map(|t| {
            let k = rng.gen_range(1..=max_columns.min(COLUMN_NAMES.len()));
            TableDef {
                name: t.to_string(),
                columns: COLUMN_NAMES
                    .choose_multiple(rng, k)
                    .map(|c| ColumnDef {
                        name: c.to_string(),
                        ty: *TYPES.choose(rng).unwrap(),
                    })
                    .collect(),
            }
        })
        .collect();
    DataModelSchema::new(tables).expect("pool names are valid identifiers")
}

fn numeric(t: ColumnType) -> bool {
    matches!(t, ColumnType::Int | ColumnType::Real)
}

fn comparable(a: ColumnType, b: ColumnType) -> bool {
    a == b || (numeric(a) && numeric(b))
}

/// Query builder over a fixed FROM/JOIN scope.
struct Scope<'a> {
    tables: Vec<&'a TableDef>,
}

impl Scope<'_> {
    /// Every (table, column) pair in scope.
    fn slots(&self) -> Vec<(&TableDef, &ColumnDef)> {
        self.tables
            .iter()
            .flat_map(|t| t.columns.iter().map(move |c| (*t, c)))
            .collect()
    }

    fn ambiguous(&self, column: &str) -> bool {
        self.tables
            .iter()
            .filter(|t| t.columns.iter().any(|c| c.name == column))
            .count()
            > 1
    }

    fn colref<R: Rng>(&self, rng: &mut R, t: &TableDef, c: &ColumnDef) -> ColumnRef {
        if self.ambiguous(&c.name) || rng.gen_bool(0.25) {
            ColumnRef::qualified(t.name.clone(), c.name.clone())
        } else {
            ColumnRef::bare(c.name.clone())
        }
    }
}

fn literal_for<R: Rng>(rng: &mut R, ty: ColumnType, like: bool) -> Literal {
    match ty {
        ColumnType::Int => Literal::Int(rng.gen_range(-2..8)),
        ColumnType::Real => {
            if rng.gen_bool(0.5) {
                Literal::Real(f64::from(rng.gen_range(-4..16)) / 4.0)
            } else {
                Literal::Int(rng.gen_range(-2..8))
            }
        }
        ColumnType::Text if like => Literal::Text(LIKE_PATTERNS.choose(rng).unwrap().to_string()),
        ColumnType::Text => Literal::Text(TEXT_VALUES.choose(rng).unwrap().to_string()),
        ColumnType::Bool => Literal::Bool(rng.gen()),
    }
}

fn random_comparison<R: Rng>(rng: &mut R, scope: &Scope<'_>) -> Comparison {
    let slots = scope.slots();
    let (t, c) = *slots.choose(rng).unwrap();
    let left = scope.colref(rng, t, c);
    let op = match c.ty {
        ColumnType::Bool => *[CmpOp::Eq, CmpOp::NotEq].choose(rng).unwrap(),
        ColumnType::Text => *CmpOp::ALL.choose(rng).unwrap(),
        _ => *CmpOp::ALL[..6].choose(rng).unwrap(),
    };
    let partners: Vec<_> = slots
        .iter()
        .filter(|(_, o)| {
            if op == CmpOp::Like {
                o.ty == ColumnType::Text
            } else {
                comparable(o.ty, c.ty)
            }
        })
        .collect();
    let right = if rng.gen_bool(0.2) && !partners.is_empty() {
        let (pt, pc) = **partners.choose(rng).unwrap();
        Operand::Column(scope.colref(rng, pt, pc))
    } else {
        Operand::Literal(literal_for(rng, c.ty, op == CmpOp::Like))
    };
    Comparison { left, op, right }
}

fn random_condition<R: Rng>(rng: &mut R, scope: &Scope<'_>, depth: usize) -> Condition {
    if depth == 0 || rng.gen_bool(0.6) {
        return Condition::Cmp(random_comparison(rng, scope));
    }
    let l = random_condition(rng, scope, depth - 1);
    let r = random_condition(rng, scope, depth - 1);
    if rng.gen_bool(0.5) {
        Condition::and(l, r)
    } else {
        Condition::or(l, r)
    }
}

fn random_aggregate<R: Rng>(rng: &mut R, scope: &Scope<'_>) -> Aggregate {
    let slots = scope.slots();
    let func = *AggFunc::ALL.choose(rng).unwrap();
    let arg = match func {
        AggFunc::Count if rng.gen_bool(0.5) => AggArg::Star,
        AggFunc::Sum | AggFunc::Avg => {
            let numeric: Vec<_> = slots.iter().filter(|(_, c)| numeric(c.ty)).collect();
            match numeric.choose(rng) {
                Some((t, c)) => AggArg::Column(scope.colref(rng, t, c)),
                None => {
                    return Aggregate {
                        func: AggFunc::Count,
                        arg: AggArg::Star,
                    }
                }
            }
        }
        _ => {
            let (t, c) = *slots.choose(rng).unwrap();
            AggArg::Column(scope.colref(rng, t, c))
        }
    };
    Aggregate { func, arg }
}

/// A query that parses, validates against `schema` and type-checks in the
/// executor.
pub fn random_query<R: Rng>(rng: &mut R, schema: &DataModelSchema) -> SqlAst {
    let from = schema.tables().choose(rng).unwrap();
    let mut scope = Scope { tables: vec![from] };
    let mut joins = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let Some(next) = schema
            .tables()
            .iter()
            .filter(|t| !scope.tables.iter().any(|s| s.name == t.name))
            .collect::<Vec<_>>()
            .choose(rng)
            .copied()
        else {
            break;
        };
        let pairs: Vec<_> = scope
            .slots()
            .into_iter()
            .flat_map(|(t, c)| {
                next.columns
                    .iter()
                    .filter(move |n| comparable(n.ty, c.ty))
                    .map(move |n| (t, c, n))
            })
            .collect();
        let Some(&(lt, lc, rc)) = pairs.choose(rng) else {
            continue;
        };
        joins.push(Join {
            table: next.name.clone(),
            left: ColumnRef::qualified(lt.name.clone(), lc.name.clone()),
            right: ColumnRef::qualified(next.name.clone(), rc.name.clone()),
        });
        scope.tables.push(next);
    }

    let slots = scope.slots();
    let mut ast = SqlAst::simple(Vec::new(), from.name.clone());
    ast.joins = joins;
    if rng.gen_bool(0.5) {
        ast.where_clause = Some(random_condition(rng, &scope, 2));
    }
    let grouped = rng.gen_bool(0.3);
    if grouped {
        if rng.gen_bool(0.6) {
            let (t, c) = *slots.choose(rng).unwrap();
            let g = scope.colref(rng, t, c);
            ast.group_by.push(g.clone());
            ast.select_items.push(SelectItem::Column(g));
        }
        for _ in 0..rng.gen_range(1..=2) {
            ast.select_items
                .push(SelectItem::Aggregate(random_aggregate(rng, &scope)));
        }
        if rng.gen_bool(0.4) {
            let key = match ast.group_by.first() {
                Some(g) if rng.gen_bool(0.5) => OrderKey::Column(g.clone()),
                _ => OrderKey::Aggregate(random_aggregate(rng, &scope)),
            };
            ast.order_by.push(OrderItem {
                key,
                direction: random_direction(rng),
            });
        }
    } else {
        if rng.gen_bool(0.3) {
            ast.select_items.push(SelectItem::Star);
        } else {
            for _ in 0..rng.gen_range(1..=3) {
                let (t, c) = *slots.choose(rng).unwrap();
                ast.select_items.push(SelectItem::Column(scope.colref(rng, t, c)));
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            if rng.gen_bool(0.5) {
                let (t, c) = *slots.choose(rng).unwrap();
                ast.order_by.push(OrderItem {
                    key: OrderKey::Column(scope.colref(rng, t, c)),
                    direction: random_direction(rng),
                });
            }
        }
    }
    if rng.gen_bool(0.3) {
        ast.limit = Some(rng.gen_range(0..6));
    }
    ast
}

fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    if rng.gen_bool(0.5) {
        Direction::Asc
    } else {
        Direction::Desc
    }
}

/// Small value domains so that joins and filters actually match rows.
pub fn random_database<R: Rng>(rng: &mut R, schema: &DataModelSchema, max_rows: usize) -> Database {
    let tables = schema
        .tables()
        .iter()
        .map(|t| Table {
            name: t.name.clone(),
            columns: t.columns.clone(),
            rows: (0..rng.gen_range(0..=max_rows))
                .map(|_| {
                    t.columns
                        .iter()
                        .map(|c| match c.ty {
                            ColumnType::Int => Value::Int(rng.gen_range(-1..5)),
                            ColumnType::Real => Value::Real(f64::from(rng.gen_range(-2..8)) / 2.0),
                            ColumnType::Text => Value::Text(TEXT_VALUES.choose(rng).unwrap().to_string()),
                            ColumnType::Bool => Value::Bool(rng.gen()),
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    Database::new(tables).expect("generated rows match the schema")
}

/// The query text with keywords lower-cased and whitespace padded, which
/// must parse back to the same canonical query.
pub fn noisy_rendering<R: Rng>(rng: &mut R, canonical: &str) -> String {
    let mut out = String::new();
    let mut in_string = false;
    for c in canonical.chars() {
        if c == '\'' {
            in_string = !in_string;
        }
        if !in_string && c == ' ' && rng.gen_bool(0.3) {
            out.push_str("  \t");
        } else {
            out.push(c);
        }
    }
    let keywords = [
        "SELECT", "FROM", "WHERE", "JOIN", "ON", "AND", "OR", "LIMIT", "ASC", "DESC", "COUNT",
    ];
    for k in keywords {
        if rng.gen_bool(0.5) {
            out = replace_outside_strings(&out, &format!("{k} "), &format!("{} ", k.to_lowercase()));
        }
    }
    out
}

fn replace_outside_strings(text: &str, from: &str, to: &str) -> String {
    text.split('\'')
        .enumerate()
        .map(|(i, part)| {
            if i % 2 == 0 {
                part.replace(from, to)
            } else {
                part.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("'")
}

/// Decoding vocabulary: keywords with their spacing, the schema's
/// identifiers, operators and punctuation, single characters so that
/// identifiers can also be spelled out piecewise, and a bare space last.
/// Under a uniform scorer every expansion ties and the lower index wins, so
/// the order decides what the beam explores: identifiers ahead of `", "`
/// lets select lists end, and a late space keeps whitespace from padding
/// the beam forever.
pub fn decode_vocab(schema: &DataModelSchema) -> Vocabulary {
    let mut tokens: Vec<String> = [
        "SELECT ",
        " FROM ",
        " WHERE ",
        " JOIN ",
        " ON ",
        " AND ",
        " OR ",
        " GROUP BY ",
        " ORDER BY ",
        " LIMIT ",
        " ASC",
        " DESC",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for t in schema.tables() {
        tokens.push(t.name.clone());
        for c in &t.columns {
            tokens.push(c.name.clone());
        }
    }
    tokens.extend(
        [
            "COUNT(", "SUM(", "AVG(", "MIN(", "MAX(", "(", ")", "*", ", ", ".", " = ", " <> ", " < ", " > ", " LIKE ",
            "'", "1", "0", "3",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    tokens.extend("abcdefghijklmnopqrstuvwxyz_".chars().map(String::from));
    tokens.push(" ".into());
    let mut seen = std::collections::HashSet::new();
    tokens.retain(|t| seen.insert(t.clone()));
    Vocabulary::with_eos(tokens).expect("nonempty distinct tokens")
}

// ---- tree edit distance oracle ----

struct Flat {
    class: Vec<NodeClass>,
    label: Vec<String>,
    /// Postorder rank of the node at each preorder position.
    post: Vec<usize>,
}

fn flatten(t: &Tree) -> Flat {
    fn walk(t: &Tree, f: &mut Flat, next_post: &mut usize) {
        let at = f.class.len();
        f.class.push(t.class);
        f.label.push(t.label.clone());
        f.post.push(0);
        for c in &t.children {
            walk(c, f, next_post);
        }
        f.post[at] = *next_post;
        *next_post += 1;
    }
    let mut f = Flat {
        class: Vec::new(),
        label: Vec::new(),
        post: Vec::new(),
    };
    walk(t, &mut f, &mut 0);
    f
}

fn oracle_relabel(costs: &CostConfig, a: (&NodeClass, &str), b: (&NodeClass, &str)) -> f64 {
    if a == b {
        0.0
    } else if a.0 == b.0 {
        costs.class(*a.0).relabel
    } else {
        costs.class(*a.0).relabel.max(costs.class(*b.0).relabel)
    }
}

/// Minimum cost over all valid edit mappings, found by enumeration. A
/// mapping is valid iff it preserves both preorder and postorder, which is
/// what keeps ancestry and sibling order intact. Exponential; keep trees
/// tiny.
pub fn brute_force_ted(a: &Tree, b: &Tree, costs: &CostConfig) -> f64 {
    let fa = flatten(a);
    let fb = flatten(b);
    let mut best = f64::INFINITY;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    search(&fa, &fb, costs, 0, &mut pairs, &mut best);
    best
}

fn search(a: &Flat, b: &Flat, costs: &CostConfig, i: usize, pairs: &mut Vec<(usize, usize)>, best: &mut f64) {
    if i == a.class.len() {
        let mut cost = 0.0;
        let mut used_b = vec![false; b.class.len()];
        let mut used_a = vec![false; a.class.len()];
        for &(x, y) in pairs.iter() {
            used_a[x] = true;
            used_b[y] = true;
            cost += oracle_relabel(costs, (&a.class[x], &a.label[x]), (&b.class[y], &b.label[y]));
        }
        for (x, used) in used_a.iter().enumerate() {
            if !used {
                cost += costs.class(a.class[x]).delete;
            }
        }
        for (y, used) in used_b.iter().enumerate() {
            if !used {
                cost += costs.class(b.class[y]).insert;
            }
        }
        *best = best.min(cost);
        return;
    }
    search(a, b, costs, i + 1, pairs, best);
    // Preorder is preserved by only mapping to later nodes of `b`.
    let start = pairs.last().map_or(0, |&(_, y)| y + 1);
    for j in start..b.class.len() {
        let post_ok = pairs
            .iter()
            .all(|&(x, y)| (a.post[x] < a.post[i]) == (b.post[y] < b.post[j]));
        if post_ok {
            pairs.push((i, j));
            search(a, b, costs, i + 1, pairs, best);
            pairs.pop();
        }
    }
}

/// Random ordered tree with at most `max_nodes` nodes, labels drawn from a
/// small alphabet so that equal labels are common.
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize) -> Tree {
    let n = rng.gen_range(1..=max_nodes);
    let classes = [
        NodeClass::Table,
        NodeClass::Column,
        NodeClass::Literal,
        NodeClass::Operator,
        NodeClass::Aggregate,
        NodeClass::Clause,
    ];
    let mut nodes: Vec<(NodeClass, String, Vec<usize>)> = Vec::new();
    for k in 0..n {
        nodes.push((
            *classes.choose(rng).unwrap(),
            ["a", "b", "c"].choose(rng).unwrap().to_string(),
            Vec::new(),
        ));
        if k > 0 {
            let parent = rng.gen_range(0..k);
            nodes[parent].2.push(k);
        }
    }
    fn build(nodes: &[(NodeClass, String, Vec<usize>)], i: usize) -> Tree {
        Tree::node(
            nodes[i].0,
            nodes[i].1.clone(),
            nodes[i].2.iter().map(|&c| build(nodes, c)).collect(),
        )
    }
    build(&nodes, 0)
}

pub fn random_costs<R: Rng>(rng: &mut R) -> CostConfig {
    let mut c = CostConfig::default();
    let choices = [0.5, 1.0, 2.0, 3.0];
    for class in [
        &mut c.table,
        &mut c.column,
        &mut c.literal,
        &mut c.operator,
        &mut c.aggregate,
        &mut c.clause,
    ] {
        class.insert = *choices.choose(rng).unwrap();
        class.delete = *choices.choose(rng).unwrap();
        class.relabel = *choices.choose(rng).unwrap();
    }
    c
}

/// Queries whose tree encoding has at most six nodes: one or two select
/// items over a single table, with optional qualifiers.
pub fn tiny_query<R: Rng>(rng: &mut R) -> SqlAst {
    let table = ["t", "u"].choose(rng).unwrap().to_string();
    let col = |rng: &mut R| -> ColumnRef {
        let name = ["a", "b"].choose(rng).unwrap().to_string();
        if rng.gen_bool(0.2) {
            ColumnRef::qualified(["t", "u"].choose(rng).unwrap().to_string(), name)
        } else {
            ColumnRef::bare(name)
        }
    };
    loop {
        let n = rng.gen_range(1..=2);
        let items = (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => SelectItem::Star,
                1 => SelectItem::Aggregate(Aggregate {
                    func: *AggFunc::ALL.choose(rng).unwrap(),
                    arg: AggArg::Star,
                }),
                _ => SelectItem::Column(col(rng)),
            })
            .collect();
        let ast = SqlAst::simple(items, table.clone());
        if nl2sql_forge::ted::encode(&ast).size() <= 6 {
            return ast;
        }
    }
}
