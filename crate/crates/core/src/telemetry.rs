//! Online experiment metrics over telemetry event logs.
//!
//! Every metric looks at one variant's events inside the window
//! `[window_end - 28 days, window_end]`, both ends inclusive.

use std::collections::{HashMap, HashSet};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::LatencyPercentiles;

pub const WINDOW_DAYS: i64 = 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TelemetryError {
    #[error("no events for variant {0}")]
    UnknownVariant(String),
    #[error("no served suggestions for variant {0} in the window")]
    NoSamples(String),
    #[error("event {index}: {message}")]
    InvalidEvent { index: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Exposed,
    SuggestionRequested,
    SuggestionServed,
    AggregateCreated,
    AggregateEdited,
    AggregateDeleted,
    ErrorRegistered,
    SuggestionInvalid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryEvent {
    pub kind: EventKind,
    pub user_id: String,
    pub variant: String,
    pub timestamp: DateTime<Utc>,
    /// Seconds; only on served suggestions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_s: Option<f64>,
    /// Correlates aggregate lifecycle events. Required on created, edited and
    /// deleted events; optional on registered errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_id: Option<String>,
}

impl TelemetryEvent {
    fn problem(&self) -> Option<String> {
        let served = self.kind == EventKind::SuggestionServed;
        match self.latency_s {
            None if served => return Some("served suggestion without latency_s".into()),
            Some(_) if !served => return Some(format!("latency_s on a {:?} event", self.kind)),
            Some(l) if !(l.is_finite() && l >= 0.0) => return Some(format!("invalid latency {l}")),
            _ => {}
        }
        let needs_id = matches!(
            self.kind,
            EventKind::AggregateCreated | EventKind::AggregateEdited | EventKind::AggregateDeleted
        );
        if needs_id && self.aggregate_id.is_none() {
            return Some(format!("{:?} event without aggregate_id", self.kind));
        }
        None
    }
}

/// Checks the per-kind field rules of every event.
pub fn validate_events(events: &[TelemetryEvent]) -> Result<(), TelemetryError> {
    match events.iter().enumerate().find_map(|(i, e)| e.problem().map(|m| (i, m))) {
        Some((index, message)) => Err(TelemetryError::InvalidEvent { index, message }),
        None => Ok(()),
    }
}

pub fn window_start(window_end: DateTime<Utc>) -> DateTime<Utc> {
    window_end - Duration::days(WINDOW_DAYS)
}

fn in_window<'a>(
    events: &'a [TelemetryEvent],
    variant: &'a str,
    window_end: DateTime<Utc>,
) -> impl Iterator<Item = &'a TelemetryEvent> + 'a {
    let start = window_start(window_end);
    events
        .iter()
        .filter(move |e| e.variant == variant && e.timestamp >= start && e.timestamp <= window_end)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Exposed users who created an aggregate, over exposed users.
pub fn adoption_rate(events: &[TelemetryEvent], variant: &str, window_end: DateTime<Utc>) -> f64 {
    let mut exposed = HashSet::new();
    let mut creators = HashSet::new();
    for e in in_window(events, variant, window_end) {
        match e.kind {
            EventKind::Exposed => {
                exposed.insert(e.user_id.as_str());
            }
            EventKind::AggregateCreated => {
                creators.insert(e.user_id.as_str());
            }
            _ => {}
        }
    }
    ratio(creators.intersection(&exposed).count(), exposed.len())
}

/// Created aggregates never edited, deleted or tied to an error afterwards,
/// over created aggregates.
pub fn engagement_rate(events: &[TelemetryEvent], variant: &str, window_end: DateTime<Utc>) -> f64 {
    let mut created: HashMap<&str, DateTime<Utc>> = HashMap::new();
    for e in in_window(events, variant, window_end) {
        if e.kind == EventKind::AggregateCreated {
            if let Some(id) = &e.aggregate_id {
                let t = created.entry(id).or_insert(e.timestamp);
                *t = (*t).min(e.timestamp);
            }
        }
    }
    let mut spoiled = HashSet::new();
    for e in in_window(events, variant, window_end) {
        if !matches!(
            e.kind,
            EventKind::AggregateEdited | EventKind::AggregateDeleted | EventKind::ErrorRegistered
        ) {
            continue;
        }
        if let Some(id) = &e.aggregate_id {
            if created.get(id.as_str()).is_some_and(|t| e.timestamp >= *t) {
                spoiled.insert(id.as_str());
            }
        }
    }
    ratio(created.len() - spoiled.len(), created.len())
}

/// Invalid suggestions over served suggestions, capped at 1.
pub fn failure_rate(events: &[TelemetryEvent], variant: &str, window_end: DateTime<Utc>) -> f64 {
    let (mut served, mut invalid) = (0, 0);
    for e in in_window(events, variant, window_end) {
        match e.kind {
            EventKind::SuggestionServed => served += 1,
            EventKind::SuggestionInvalid => invalid += 1,
            _ => {}
        }
    }
    ratio(usize::min(invalid, served), served)
}

pub fn latency_percentiles(
    events: &[TelemetryEvent],
    variant: &str,
    window_end: DateTime<Utc>,
) -> Result<LatencyPercentiles, TelemetryError> {
    let samples: Vec<f64> = in_window(events, variant, window_end)
        .filter(|e| e.kind == EventKind::SuggestionServed)
        .filter_map(|e| e.latency_s)
        .collect();
    LatencyPercentiles::from_samples(&samples).ok_or_else(|| TelemetryError::NoSamples(variant.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantMetrics {
    pub variant: String,
    pub adoption_rate: f64,
    pub engagement_rate: f64,
    pub failure_rate: f64,
    /// Absent when nothing was served in the window.
    pub latency: Option<LatencyPercentiles>,
}

pub fn variant_metrics(
    events: &[TelemetryEvent],
    variant: &str,
    window_end: DateTime<Utc>,
) -> Result<VariantMetrics, TelemetryError> {
    if !events.iter().any(|e| e.variant == variant) {
        return Err(TelemetryError::UnknownVariant(variant.to_string()));
    }
    Ok(VariantMetrics {
        variant: variant.to_string(),
        adoption_rate: adoption_rate(events, variant, window_end),
        engagement_rate: engagement_rate(events, variant, window_end),
        failure_rate: failure_rate(events, variant, window_end),
        latency: latency_percentiles(events, variant, window_end).ok(),
    })
}

/// Treatment over control. Absent when the control value is not positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: Option<f64>,
    /// One decimal, rounded half away from zero, e.g. `"1.8x"`.
    pub rendered: Option<String>,
}

impl Ratio {
    pub fn of(treatment: f64, control: f64) -> Self {
        if control > 0.0 {
            let value = treatment / control;
            Ratio {
                value: Some(value),
                rendered: Some(render_ratio(value)),
            }
        } else {
            Ratio {
                value: None,
                rendered: None,
            }
        }
    }
}

pub fn render_ratio(r: f64) -> String {
    format!("{:.1}x", (r * 10.0).round() / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbRatios {
    pub adoption: Ratio,
    pub engagement: Ratio,
    pub failure: Ratio,
    pub latency_p50: Ratio,
    pub latency_p99: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbReport {
    pub window_start: DateTime<Utc>,
    pub window_end: DateTime<Utc>,
    pub control: VariantMetrics,
    pub treatment: VariantMetrics,
    pub ratios: AbRatios,
}

pub fn ab_report(
    events: &[TelemetryEvent],
    control: &str,
    treatment: &str,
    window_end: DateTime<Utc>,
) -> Result<AbReport, TelemetryError> {
    validate_events(events)?;
    let c = variant_metrics(events, control, window_end)?;
    let t = variant_metrics(events, treatment, window_end)?;
    let latency = |m: &VariantMetrics, f: fn(&LatencyPercentiles) -> f64| m.latency.as_ref().map_or(0.0, f);
    let ratios = AbRatios {
        adoption: Ratio::of(t.adoption_rate, c.adoption_rate),
        engagement: Ratio::of(t.engagement_rate, c.engagement_rate),
        failure: Ratio::of(t.failure_rate, c.failure_rate),
        latency_p50: Ratio::of(latency(&t, |l| l.p50), latency(&c, |l| l.p50)),
        latency_p99: Ratio::of(latency(&t, |l| l.p99), latency(&c, |l| l.p99)),
    };
    Ok(AbReport {
        window_start: window_start(window_end),
        window_end,
        control: c,
        treatment: t,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn end() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap()
    }

    fn ev(kind: EventKind, user: &str, t: DateTime<Utc>) -> TelemetryEvent {
        TelemetryEvent {
            kind,
            user_id: user.into(),
            variant: "A".into(),
            timestamp: t,
            latency_s: (kind == EventKind::SuggestionServed).then_some(1.0),
            aggregate_id: None,
        }
    }

    fn created(user: &str, id: &str, t: DateTime<Utc>) -> TelemetryEvent {
        TelemetryEvent {
            aggregate_id: Some(id.into()),
            ..ev(EventKind::AggregateCreated, user, t)
        }
    }

    #[test]
    fn window_bounds_are_inclusive() {
        let start = window_start(end());
        let events = vec![
            ev(EventKind::Exposed, "a", start),
            ev(EventKind::Exposed, "b", end()),
            ev(EventKind::Exposed, "c", start - Duration::seconds(1)),
            created("a", "x", start),
            created("a", "y", end()),
            created("c", "z", end()),
        ];
        assert_eq!(adoption_rate(&events, "A", end()), 0.5);
        assert_eq!(adoption_rate(&events, "B", end()), 0.0);
    }

    #[test]
    fn engagement_needs_clean_aggregates() {
        let t = end() - Duration::days(1);
        let mut edit = created("a", "x", t + Duration::hours(1));
        edit.kind = EventKind::AggregateEdited;
        let mut before = created("a", "y", t - Duration::hours(1));
        before.kind = EventKind::AggregateDeleted;
        let events = vec![created("a", "x", t), created("a", "y", t), edit, before];
        assert_eq!(engagement_rate(&events, "A", end()), 0.5);
        assert_eq!(engagement_rate(&[], "A", end()), 0.0);
    }

    #[test]
    fn failures_and_validation() {
        let t = end();
        let mut events = vec![ev(EventKind::SuggestionServed, "a", t); 4];
        events.push(ev(EventKind::SuggestionInvalid, "a", t));
        assert_eq!(failure_rate(&events, "A", end()), 0.25);
        assert!(validate_events(&events).is_ok());
        events[0].latency_s = None;
        assert!(validate_events(&events).is_err());
    }

    #[test]
    fn rendering() {
        assert_eq!(render_ratio(0.17 / 0.096), "1.8x");
        assert_eq!(render_ratio(0.037 / 0.017), "2.2x");
        assert_eq!(render_ratio(0.06 / 0.35), "0.2x");
        assert_eq!(render_ratio(1.0), "1.0x");
        assert_eq!(render_ratio(1.25), "1.3x");
    }
}
