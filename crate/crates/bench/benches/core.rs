use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nl2sql_forge::decoding::scorers::{CharTrigramScorer, UniformScorer};
use nl2sql_forge::decoding::{beam_decode, init_state, valid_mask, Vocabulary};
use nl2sql_forge::grammar::ColumnType::{Int, Real, Text};
use nl2sql_forge::ted::{ted, CostConfig};
use nl2sql_forge::{parse, DataModelSchema};

const QUERIES: [&str; 4] = [
    "SELECT COUNT(*) FROM cars_data WHERE cylinders > 4",
    "SELECT name, price FROM item WHERE price > 10 AND name LIKE 'a%' ORDER BY price DESC LIMIT 5",
    "SELECT User.country, COUNT(*) FROM User JOIN Account ON User.id = Account.user_id GROUP BY User.country",
    "SELECT MAX(price), MIN(price), AVG(price) FROM item WHERE (price > 1 OR name = 'x') AND price < 100",
];

fn schema() -> DataModelSchema {
    DataModelSchema::from_columns(&[
        ("User", &[("id", Int), ("country", Text)]),
        ("Account", &[("id", Int), ("user_id", Int)]),
        ("item", &[("id", Int), ("name", Text), ("price", Real)]),
        ("cars_data", &[("id", Int), ("cylinders", Int)]),
    ])
    .unwrap()
}

/// Keywords, identifiers, operators and single characters.
fn vocab() -> Vocabulary {
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
        "User",
        "Account",
        "item",
        "cars_data",
        "id",
        "country",
        "user_id",
        "name",
        "price",
        "cylinders",
        "COUNT(",
        "SUM(",
        "AVG(",
        "MIN(",
        "MAX(",
        "(",
        ")",
        "*",
        ".",
        " = ",
        " <> ",
        " < ",
        " > ",
        " LIKE ",
        "'",
        "1",
        "4",
        "0",
        ", ",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    tokens.extend(('a'..='z').map(String::from));
    tokens.push(" ".into());
    Vocabulary::with_eos(tokens).unwrap()
}

fn bench_parse(c: &mut Criterion) {
    let mut group = c.benchmark_group("parse");
    for (i, q) in QUERIES.iter().enumerate() {
        group.bench_with_input(BenchmarkId::from_parameter(i), q, |b, q| {
            b.iter(|| parse(black_box(q)).unwrap())
        });
    }
    group.finish();
}

fn bench_mask(c: &mut Criterion) {
    let schema = schema();
    let vocab = vocab();
    let mut group = c.benchmark_group("valid_mask");
    for prefix in ["", "SELECT ", "SELECT name, price FROM item WHERE pr", QUERIES[2]] {
        let state = init_state(&schema).advance(prefix).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(prefix.len()), &state, |b, st| {
            b.iter(|| valid_mask(black_box(st), &vocab).unwrap())
        });
    }
    group.finish();
}

fn bench_ted(c: &mut Criterion) {
    let costs = CostConfig::default();
    let asts: Vec<_> = QUERIES.iter().map(|q| parse(q).unwrap()).collect();
    let mut group = c.benchmark_group("ted");
    group.bench_function("same", |b| {
        b.iter(|| ted(black_box(&asts[1]), black_box(&asts[1]), &costs))
    });
    group.bench_function("different", |b| {
        b.iter(|| ted(black_box(&asts[2]), black_box(&asts[3]), &costs))
    });
    group.finish();
}

fn bench_beam(c: &mut Criterion) {
    let schema = schema();
    let vocab = vocab();
    let uniform = UniformScorer::new(&vocab);
    let trigram = CharTrigramScorer::train(vocab.clone(), &QUERIES);
    let mut group = c.benchmark_group("beam_decode");
    group.sample_size(20);
    for beam in [1, 4] {
        group.bench_with_input(BenchmarkId::new("uniform", beam), &beam, |b, &k| {
            b.iter(|| beam_decode("q", &schema, &uniform, &vocab, k, 40))
        });
        group.bench_with_input(BenchmarkId::new("trigram", beam), &beam, |b, &k| {
            b.iter(|| beam_decode("q", &schema, &trigram, &vocab, k, 40))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_parse, bench_mask, bench_ted, bench_beam);
criterion_main!(benches);
