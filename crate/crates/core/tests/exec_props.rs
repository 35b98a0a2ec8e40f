mod common;

use std::cmp::Ordering;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nl2sql_forge::exec::{execute, execution_match, Database, Value};
use nl2sql_forge::grammar::{AggArg, AggFunc, Aggregate, Direction, OrderKey, SelectItem};
use nl2sql_forge::serialize;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_queries_execute_and_match_themselves(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = common::random_schema(&mut rng, 3, 4);
        let db = common::random_database(&mut rng, &schema, 6);
        let q = common::random_query(&mut rng, &schema);
        let out = execute(&q, &db);
        prop_assert!(out.is_ok(), "{}: {:?}", serialize(&q), out);
        prop_assert_eq!(execution_match(&q, &q, &db), Ok(true));
        let rel = out.unwrap();
        prop_assert!(rel.rows.iter().all(|r| r.len() == rel.columns.len()));
        if let Some(n) = q.limit {
            prop_assert!(rel.rows.len() as u64 <= n);
        }
    }

    #[test]
    fn count_star_counts_the_filtered_rows(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = common::random_schema(&mut rng, 3, 4);
        let db = common::random_database(&mut rng, &schema, 6);
        let mut q = common::random_query(&mut rng, &schema);
        q.group_by.clear();
        q.order_by.clear();
        q.limit = None;
        q.select_items = vec![SelectItem::Star];
        let rows = execute(&q, &db).unwrap().rows.len();
        q.select_items = vec![SelectItem::Aggregate(Aggregate { func: AggFunc::Count, arg: AggArg::Star })];
        let counted = execute(&q, &db).unwrap().rows;
        prop_assert_eq!(counted, vec![vec![Value::Int(rows as i64)]]);
    }

    #[test]
    fn order_by_a_selected_column_sorts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = common::random_schema(&mut rng, 2, 4);
        let db = common::random_database(&mut rng, &schema, 8);
        let mut q = common::random_query(&mut rng, &schema);
        let Some(SelectItem::Column(c)) = q.select_items.first().cloned() else {
            return Ok(());
        };
        if !q.group_by.is_empty() && !q.group_by.contains(&c) {
            return Ok(());
        }
        let dir = if rng.gen_bool(0.5) { Direction::Asc } else { Direction::Desc };
        q.order_by = vec![nl2sql_forge::grammar::OrderItem { key: OrderKey::Column(c), direction: dir }];
        let rows = execute(&q, &db).unwrap().rows;
        for w in rows.windows(2) {
            let ord = w[0][0].total_cmp(&w[1][0]);
            let bad = if dir == Direction::Asc { Ordering::Greater } else { Ordering::Less };
            prop_assert_ne!(ord, bad);
        }
    }

    #[test]
    fn database_json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = common::random_schema(&mut rng, 3, 4);
        let db = common::random_database(&mut rng, &schema, 4);
        let json = serde_json::to_string(&db).unwrap();
        let back: Database = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, db);
    }
}
