use serde::{Deserialize, Serialize};

use super::features::{extract_features, FeatureConfig};
use super::tree::{tree_eval, DecisionTree};
use super::QualityError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrowdPair {
    pub nl: String,
    pub sql: String,
    pub work_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    #[serde(flatten)]
    pub pair: CrowdPair,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub accepted: Vec<ScoredPair>,
    /// Left for manual review.
    pub flagged: Vec<ScoredPair>,
}

/// Tree score of one pair; pairs whose SQL does not parse (or whose work
/// time is invalid) score 0.
pub fn score_pair(pair: &CrowdPair, tree: &DecisionTree, config: &FeatureConfig) -> f64 {
    extract_features(&pair.nl, &pair.sql, pair.work_time_s, config)
        .map(|fv| tree_eval(tree, &fv).1)
        .unwrap_or(0.0)
}

/// Accepts pairs scoring at least `threshold`; the rest are flagged. Input
/// order is kept within each side.
pub fn filter_pairs(
    pairs: &[CrowdPair],
    tree: &DecisionTree,
    threshold: f64,
    config: &FeatureConfig,
) -> Result<FilterOutcome, QualityError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(QualityError::InvalidParameter(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let mut out = FilterOutcome::default();
    for p in pairs {
        let scored = ScoredPair {
            pair: p.clone(),
            score: score_pair(p, tree, config),
        };
        if scored.score >= threshold {
            out.accepted.push(scored);
        } else {
            out.flagged.push(scored);
        }
    }
    Ok(out)
}
