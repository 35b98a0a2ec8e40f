mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nl2sql_forge::parse;
use nl2sql_forge::ted::{
    aggregate_report, encode, exact_match, ted, tree_distance, ClassCost, CostConfig, EvalRow, TedError,
};

fn symmetric(mut c: CostConfig) -> CostConfig {
    for class in [
        &mut c.table,
        &mut c.column,
        &mut c.literal,
        &mut c.operator,
        &mut c.aggregate,
        &mut c.clause,
    ] {
        class.delete = class.insert;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_brute_force_on_small_trees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs = common::random_costs(&mut rng);
        let a = common::random_tree(&mut rng, 6);
        let b = common::random_tree(&mut rng, 6);
        let fast = tree_distance(&a, &b, &costs);
        let slow = common::brute_force_ted(&a, &b, &costs);
        prop_assert!((fast - slow).abs() <= 1e-9, "{} vs {}", fast, slow);
    }

    #[test]
    fn metric_properties_on_queries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = common::random_schema(&mut rng, 3, 4);
        let costs = CostConfig::default();
        let q: Vec<_> = (0..3).map(|_| common::random_query(&mut rng, &schema)).collect();
        let d = |i: usize, j: usize| ted(&q[i], &q[j], &costs);
        prop_assert_eq!(d(0, 0), 0.0);
        prop_assert!(d(0, 1) >= 0.0);
        prop_assert_eq!(d(0, 1) == 0.0, exact_match(&q[0], &q[1]));
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }

    #[test]
    fn symmetric_costs_give_symmetric_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs = symmetric(common::random_costs(&mut rng));
        let a = common::random_tree(&mut rng, 8);
        let b = common::random_tree(&mut rng, 8);
        prop_assert!((tree_distance(&a, &b, &costs) - tree_distance(&b, &a, &costs)).abs() <= 1e-9);
    }

    #[test]
    fn distance_is_bounded_by_delete_all_insert_all(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs = common::random_costs(&mut rng);
        let a = common::random_tree(&mut rng, 10);
        let b = common::random_tree(&mut rng, 10);
        let bound = |t: &nl2sql_forge::ted::Tree, f: fn(&ClassCost) -> f64| {
            fn walk(t: &nl2sql_forge::ted::Tree, c: &CostConfig, f: fn(&ClassCost) -> f64) -> f64 {
                f(c.class(t.class)) + t.children.iter().map(|x| walk(x, c, f)).sum::<f64>()
            }
            walk(t, &costs, f)
        };
        let upper = bound(&a, |c| c.delete) + bound(&b, |c| c.insert);
        prop_assert!(tree_distance(&a, &b, &costs) <= upper + 1e-9);
    }
}

#[test]
fn weighting_examples() {
    let d = |a: &str, b: &str| ted(&parse(a).unwrap(), &parse(b).unwrap(), &CostConfig::default());
    assert_eq!(d("SELECT a FROM t", "SELECT b FROM t"), 1.0);
    assert_eq!(d("SELECT a FROM t", "SELECT a FROM u"), 3.0);
    // Adding a WHERE clause inserts the clause node, the operator and two leaves.
    assert_eq!(
        d("SELECT a FROM t", "SELECT a FROM t WHERE a = 1"),
        2.0 + 1.0 + 1.0 + 1.0
    );
    assert_eq!(encode(&parse("SELECT a FROM t").unwrap()).size(), 5);
}

#[test]
fn report_micro_and_macro() {
    let row = |g: &str, p: &str| EvalRow {
        gold: parse(g).unwrap(),
        pred: parse(p).unwrap(),
        latency_s: 1.0,
    };
    let rows = vec![
        row("SELECT a FROM t", "SELECT a FROM t"),
        row("SELECT b FROM u", "SELECT c FROM u"),
        row("SELECT b FROM u", "SELECT b FROM u"),
        row("SELECT * FROM t WHERE a = 1", "SELECT * FROM t WHERE a = 2"),
    ];
    let r = aggregate_report(&rows, &CostConfig::default()).unwrap();
    assert_eq!(r.templates.len(), 2);
    assert_eq!(r.templates.iter().map(|t| t.count).sum::<usize>(), 4);
    // Rows: 0, 1, 0 in one template and 1 in the other.
    assert!((r.micro.mean_ted - 0.5).abs() < 1e-12);
    assert!((r.macro_avg.mean_ted - (1.0 / 3.0 + 1.0) / 2.0).abs() < 1e-12);
    assert!((r.micro.exact_match_rate - 0.5).abs() < 1e-12);
    assert!(r.micro.execution_match_rate.is_none());
    assert_eq!(aggregate_report(&[], &CostConfig::default()), Err(TedError::EmptyInput));
}
