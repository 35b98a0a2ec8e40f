//! Quality estimation for crowd-sourced (question, SQL) pairs.

mod features;
mod filter;
mod hardness;
mod levenshtein;
mod tree;

use thiserror::Error;

use crate::grammar::ParseError;

pub use features::{
    extract_features, features_of, FeatureConfig, FeatureVector, LexiconError, Lexicons, FEATURE_COUNT, FEATURE_NAMES,
};
pub use filter::{filter_pairs, score_pair, CrowdPair, FilterOutcome, ScoredPair};
pub use hardness::{component_count, hardness, Hardness};
pub use levenshtein::levenshtein;
pub use tree::{tree_eval, tree_train, DecisionTree, TreeNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QualityError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("work time must be finite and non-negative, got {0}")]
    InvalidWorkTime(f64),
    #[error("no training data")]
    EmptyData,
    #[error("invalid decision tree: {0}")]
    InvalidTree(String),
    #[error("{0}")]
    InvalidParameter(String),
}
