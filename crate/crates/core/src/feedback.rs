//! Turning production interactions into retraining data, and picking the
//! templates to collect more labels for.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{parse, serialize, DataModelSchema};
use crate::ted::EvalReport;
use crate::templates::{extract_template, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedbackError {
    #[error("report has no templates")]
    EmptyReport,
    #[error("k must be at least 1")]
    InvalidK,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub nl: String,
    pub schema: DataModelSchema,
    pub predicted_sql: String,
    pub final_sql: String,
    pub edited: bool,
    pub deleted: bool,
    pub timestamp: DateTime<Utc>,
    pub user_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InteractionCase {
    /// Kept as suggested. Correct and wrong-but-kept suggestions look alike
    /// without a label, so neither feeds retraining.
    UneditedKept,
    EditedAccepted,
    /// Edited, but the edit itself looks unreliable.
    EditedRejected,
    Deleted,
}

pub fn classify_interaction(rec: &InteractionRecord, quality_score: f64, threshold: f64) -> InteractionCase {
    if rec.deleted {
        InteractionCase::Deleted
    } else if !rec.edited {
        InteractionCase::UneditedKept
    } else if quality_score >= threshold {
        InteractionCase::EditedAccepted
    } else {
        InteractionCase::EditedRejected
    }
}

/// Scores a (question, SQL) pair in [0, 1].
pub trait PairScorer {
    fn score(&self, nl: &str, sql: &str) -> f64;
}

impl<F> PairScorer for F
where
    F: Fn(&str, &str) -> f64,
{
    fn score(&self, nl: &str, sql: &str) -> f64 {
        self(nl, sql)
    }
}

/// A retraining pair, in the corpus line format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub nl: String,
    pub sql: String,
}

/// For each question, keeps the best-scoring edited version (latest
/// timestamp on ties) if it is accepted at `threshold`. Unedited and deleted
/// records never contribute, nor do final queries that fail to parse. Output
/// is ordered by template text, then timestamp.
pub fn build_training_set(records: &[InteractionRecord], scorer: &dyn PairScorer, threshold: f64) -> Vec<TrainingPair> {
    let mut best: BTreeMap<&str, (f64, &InteractionRecord, String)> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.edited && !r.deleted) {
        let Ok(ast) = parse(&rec.final_sql) else {
            log::warn!("skipping unparseable final_sql for {:?}", rec.nl);
            continue;
        };
        let sql = serialize(&ast);
        let score = scorer.score(&rec.nl, &sql);
        if score.is_nan() {
            continue;
        }
        let replace = match best.get(rec.nl.as_str()) {
            None => true,
            Some((s, r, _)) => match score.total_cmp(s) {
                Ordering::Greater => true,
                Ordering::Equal => rec.timestamp >= r.timestamp,
                Ordering::Less => false,
            },
        };
        if replace {
            best.insert(&rec.nl, (score, rec, sql));
        }
    }
    let mut kept: Vec<(String, DateTime<Utc>, TrainingPair)> = best
        .into_values()
        .filter(|(score, rec, _)| classify_interaction(rec, *score, threshold) == InteractionCase::EditedAccepted)
        .map(|(_, rec, sql)| {
            let template = extract_template(&parse(&sql).expect("canonical text parses")).text;
            (
                template,
                rec.timestamp,
                TrainingPair {
                    nl: rec.nl.clone(),
                    sql,
                },
            )
        })
        .collect();
    kept.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    kept.into_iter().map(|(_, _, p)| p).collect()
}

/// The `k` templates with the highest mean TED; ties go to the lower exact
/// match rate, then to the smaller template text. `k` is clipped to the
/// number of templates.
pub fn select_worst_templates(report: &EvalReport, k: usize) -> Result<Vec<Template>, FeedbackError> {
    if k == 0 {
        return Err(FeedbackError::InvalidK);
    }
    if report.templates.is_empty() {
        return Err(FeedbackError::EmptyReport);
    }
    let mut rows: Vec<_> = report.templates.iter().collect();
    rows.sort_by(|a, b| {
        b.mean_ted
            .total_cmp(&a.mean_ted)
            .then(a.exact_match_rate.total_cmp(&b.exact_match_rate))
            .then_with(|| a.template.cmp(&b.template))
    });
    Ok(rows
        .into_iter()
        .take(k)
        .map(|t| Template::new(t.template.clone()))
        .collect())
}
