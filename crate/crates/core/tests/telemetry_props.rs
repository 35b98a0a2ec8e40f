use chrono::{DateTime, Duration, TimeZone, Utc};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nl2sql_forge::stats::{percentile_nearest_rank, LatencyPercentiles};
use nl2sql_forge::telemetry::{
    ab_report, adoption_rate, engagement_rate, failure_rate, validate_events, variant_metrics, EventKind,
    TelemetryError, TelemetryEvent, WINDOW_DAYS,
};

fn end() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 6, 30, 12, 0, 0).unwrap()
}

const KINDS: [EventKind; 8] = [
    EventKind::Exposed,
    EventKind::SuggestionRequested,
    EventKind::SuggestionServed,
    EventKind::AggregateCreated,
    EventKind::AggregateEdited,
    EventKind::AggregateDeleted,
    EventKind::ErrorRegistered,
    EventKind::SuggestionInvalid,
];

fn event<R: Rng>(rng: &mut R, variant: &str, at: DateTime<Utc>) -> TelemetryEvent {
    let kind = *KINDS.choose(rng).unwrap();
    let needs_id = matches!(
        kind,
        EventKind::AggregateCreated | EventKind::AggregateEdited | EventKind::AggregateDeleted
    );
    TelemetryEvent {
        kind,
        user_id: format!("u{}", rng.gen_range(0..8)),
        variant: variant.to_string(),
        timestamp: at,
        latency_s: (kind == EventKind::SuggestionServed).then(|| rng.gen_range(0.05..5.0)),
        aggregate_id: (needs_id || (kind == EventKind::ErrorRegistered && rng.gen_bool(0.5)))
            .then(|| format!("g{}", rng.gen_range(0..10))),
    }
}

/// Events for arms "A" and "B", all inside the window.
fn events(seed: u64, n: usize) -> Vec<TelemetryEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<_> = (0..n)
        .map(|_| {
            let arm = if rng.gen_bool(0.5) { "A" } else { "B" };
            let at = end() - Duration::minutes(rng.gen_range(0..=WINDOW_DAYS * 24 * 60));
            event(&mut rng, arm, at)
        })
        .collect();
    for arm in ["A", "B"] {
        out.push(event(&mut rng, arm, end()));
    }
    out
}

/// Events for either arm strictly before the window start or after its end.
fn outside(seed: u64, n: usize) -> Vec<TelemetryEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n)
        .map(|_| {
            let at = if rng.gen_bool(0.5) {
                end() - Duration::days(WINDOW_DAYS) - Duration::seconds(rng.gen_range(1..1_000_000))
            } else {
                end() + Duration::seconds(rng.gen_range(1..1_000_000))
            };
            let arm = if rng.gen_bool(0.5) { "A" } else { "B" };
            event(&mut rng, arm, at)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn events_outside_the_window_change_nothing(seed in any::<u64>(), n in 0usize..80, m in 1usize..40) {
        let inside = events(seed, n);
        let mut all = inside.clone();
        all.extend(outside(seed, m));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        all.shuffle(&mut rng);
        for arm in ["A", "B"] {
            prop_assert_eq!(variant_metrics(&all, arm, end()).unwrap(), variant_metrics(&inside, arm, end()).unwrap());
        }
    }

    #[test]
    fn rates_are_fractions(seed in any::<u64>(), n in 0usize..120) {
        let ev = events(seed, n);
        for arm in ["A", "B"] {
            for r in [adoption_rate(&ev, arm, end()), engagement_rate(&ev, arm, end()), failure_rate(&ev, arm, end())] {
                prop_assert!((0.0..=1.0).contains(&r), "{}", r);
            }
        }
    }

    #[test]
    fn adoption_matches_a_direct_count(seed in any::<u64>(), n in 0usize..120) {
        let ev = events(seed, n);
        let users = |kind: EventKind| -> std::collections::BTreeSet<&str> {
            ev.iter().filter(|e| e.variant == "A" && e.kind == kind).map(|e| e.user_id.as_str()).collect()
        };
        let exposed = users(EventKind::Exposed);
        let creators = users(EventKind::AggregateCreated);
        let expected = if exposed.is_empty() {
            0.0
        } else {
            exposed.intersection(&creators).count() as f64 / exposed.len() as f64
        };
        prop_assert_eq!(adoption_rate(&ev, "A", end()), expected);
    }

    #[test]
    fn swapping_arms_inverts_ratios(seed in any::<u64>(), n in 20usize..150) {
        let ev = events(seed, n);
        let ab = ab_report(&ev, "A", "B", end()).unwrap();
        let ba = ab_report(&ev, "B", "A", end()).unwrap();
        prop_assert_eq!(&ab.control, &ba.treatment);
        for (x, y) in [
            (&ab.ratios.adoption, &ba.ratios.adoption),
            (&ab.ratios.engagement, &ba.ratios.engagement),
            (&ab.ratios.failure, &ba.ratios.failure),
            (&ab.ratios.latency_p50, &ba.ratios.latency_p50),
        ] {
            if let (Some(a), Some(b)) = (x.value, y.value) {
                prop_assert!((a * b - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn percentiles_are_ordered_samples(samples in prop::collection::vec(0.0f64..100.0, 1..60)) {
        let p = LatencyPercentiles::from_samples(&samples).unwrap();
        prop_assert!(p.p50 <= p.p90 && p.p90 <= p.p99);
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        for (q, v) in [(0.5, p.p50), (0.9, p.p90), (0.99, p.p99)] {
            // Smallest sample with at least q of the samples at or below it.
            let n = sorted.len() as f64;
            let expected = sorted.iter().copied().find(|x| sorted.iter().filter(|y| *y <= x).count() as f64 >= q * n);
            prop_assert_eq!(Some(v), expected);
        }
    }
}

#[test]
fn percentile_examples() {
    let s: Vec<f64> = (1..=10).map(f64::from).collect();
    assert_eq!(percentile_nearest_rank(&s, 50.0), Some(5.0));
    assert_eq!(percentile_nearest_rank(&s, 90.0), Some(9.0));
    assert_eq!(percentile_nearest_rank(&s, 99.0), Some(10.0));
    assert_eq!(percentile_nearest_rank(&[], 50.0), None);
}

#[test]
fn invalid_events_and_unknown_variants() {
    let mut ev = events(1, 10);
    assert!(matches!(
        variant_metrics(&ev, "C", end()),
        Err(TelemetryError::UnknownVariant(_))
    ));
    ev.push(TelemetryEvent {
        kind: EventKind::SuggestionServed,
        user_id: "u".into(),
        variant: "A".into(),
        timestamp: end(),
        latency_s: None,
        aggregate_id: None,
    });
    let last = ev.len() - 1;
    assert!(matches!(validate_events(&ev), Err(TelemetryError::InvalidEvent { index, .. }) if index == last));
    assert!(ab_report(&ev, "A", "B", end()).is_err());
}
