//! Per-template evaluation reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exec::{execution_match, Database};
use crate::grammar::SqlAst;
use crate::stats::{mean, LatencyPercentiles};
use crate::templates::extract_template;

use super::{exact_match, ted, CostConfig, TedError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub gold: SqlAst,
    pub pred: SqlAst,
    pub latency_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateStats {
    pub template: String,
    pub count: usize,
    pub mean_ted: f64,
    pub exact_match_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution_match_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub mean_ted: f64,
    pub exact_match_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution_match_rate: Option<f64>,
}

/// Templates are listed in lexicographic order. `micro` weights every row
/// equally, `macro` every template equally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub templates: Vec<TemplateStats>,
    pub micro: Averages,
    #[serde(rename = "macro")]
    pub macro_avg: Averages,
    pub latency: LatencyPercentiles,
}

struct Acc {
    teds: Vec<f64>,
    exact: usize,
    exec: usize,
}

pub fn aggregate_report(rows: &[EvalRow], costs: &CostConfig) -> Result<EvalReport, TedError> {
    aggregate_report_with_db(rows, costs, None)
}

/// As [`aggregate_report`], adding execution-match rates when `db` is given.
/// A prediction that fails to execute counts as a mismatch.
pub fn aggregate_report_with_db(
    rows: &[EvalRow],
    costs: &CostConfig,
    db: Option<&Database>,
) -> Result<EvalReport, TedError> {
    if rows.is_empty() {
        return Err(TedError::EmptyInput);
    }
    costs.validate()?;
    if let Some(r) = rows.iter().find(|r| !(r.latency_s.is_finite() && r.latency_s >= 0.0)) {
        return Err(TedError::InvalidLatency(r.latency_s));
    }
    let mut groups: BTreeMap<String, Acc> = BTreeMap::new();
    for r in rows {
        let acc = groups.entry(extract_template(&r.gold).text).or_insert(Acc {
            teds: Vec::new(),
            exact: 0,
            exec: 0,
        });
        acc.teds.push(ted(&r.gold, &r.pred, costs));
        acc.exact += usize::from(exact_match(&r.gold, &r.pred));
        if let Some(db) = db {
            acc.exec += usize::from(execution_match(&r.gold, &r.pred, db).unwrap_or(false));
        }
    }
    let templates: Vec<TemplateStats> = groups
        .into_iter()
        .map(|(template, acc)| {
            let n = acc.teds.len() as f64;
            TemplateStats {
                template,
                count: acc.teds.len(),
                mean_ted: mean(acc.teds.iter().copied()),
                exact_match_rate: acc.exact as f64 / n,
                execution_match_rate: db.map(|_| acc.exec as f64 / n),
            }
        })
        .collect();

    let total: usize = templates.iter().map(|t| t.count).sum();
    let weighted =
        |f: &dyn Fn(&TemplateStats) -> f64| templates.iter().map(|t| t.count as f64 * f(t)).sum::<f64>() / total as f64;
    let micro = Averages {
        mean_ted: weighted(&|t| t.mean_ted),
        exact_match_rate: weighted(&|t| t.exact_match_rate),
        execution_match_rate: db.map(|_| weighted(&|t| t.execution_match_rate.unwrap_or(0.0))),
    };
    let macro_avg = Averages {
        mean_ted: mean(templates.iter().map(|t| t.mean_ted)),
        exact_match_rate: mean(templates.iter().map(|t| t.exact_match_rate)),
        execution_match_rate: db.map(|_| mean(templates.iter().map(|t| t.execution_match_rate.unwrap_or(0.0)))),
    };
    let latencies: Vec<f64> = rows.iter().map(|r| r.latency_s).collect();
    Ok(EvalReport {
        templates,
        micro,
        macro_avg,
        latency: LatencyPercentiles::from_samples(&latencies).expect("rows are nonempty"),
    })
}
