//! The eight (question, SQL) pair features fed to the quality classifier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{parse, serialize, Direction, Literal, Operand, SqlAst};

use super::hardness::{hardness, Hardness};
use super::levenshtein::levenshtein;
use super::QualityError;

pub const FEATURE_COUNT: usize = 8;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "work_time_s",
    "has_more_than_two_words",
    "terminals_in_nl",
    "sql_complexity",
    "time_per_complexity",
    "levenshtein_nl_sql",
    "order_by_direction_match",
    "limit_words_present",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub work_time_s: f64,
    pub has_more_than_two_words: bool,
    pub terminals_in_nl: bool,
    pub sql_complexity: Hardness,
    pub time_per_complexity: f64,
    pub levenshtein_nl_sql: usize,
    pub order_by_direction_match: bool,
    pub limit_words_present: bool,
}

impl FeatureVector {
    /// Numeric view in [`FEATURE_NAMES`] order; booleans are 0/1 and the
    /// complexity is its 1–4 code.
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.work_time_s,
            f64::from(u8::from(self.has_more_than_two_words)),
            f64::from(u8::from(self.terminals_in_nl)),
            f64::from(self.sql_complexity.code()),
            self.time_per_complexity,
            self.levenshtein_nl_sql as f64,
            f64::from(u8::from(self.order_by_direction_match)),
            f64::from(u8::from(self.limit_words_present)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("lexicon {0} is empty")]
    Empty(&'static str),
    #[error("lexicon {list} entry {entry:?} must be nonempty lowercase text")]
    BadEntry { list: &'static str, entry: String },
}

/// Words describing sort directions and result limits. Entries may be
/// multi-word phrases; they match whole words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLexicons")]
pub struct Lexicons {
    asc: Vec<String>,
    desc: Vec<String>,
    limit: Vec<String>,
}

#[derive(Deserialize)]
struct RawLexicons {
    asc: Vec<String>,
    desc: Vec<String>,
    limit: Vec<String>,
}

impl TryFrom<RawLexicons> for Lexicons {
    type Error = LexiconError;

    fn try_from(r: RawLexicons) -> Result<Self, LexiconError> {
        Lexicons::new(r.asc, r.desc, r.limit)
    }
}

impl Default for Lexicons {
    fn default() -> Self {
        let words = |w: &[&str]| w.iter().map(|s| s.to_string()).collect();
        Lexicons {
            asc: words(&["ascending", "increasing", "alphabetical"]),
            desc: words(&["descending", "decreasing", "reverse"]),
            limit: words(&["top", "first", "last", "only", "maximum", "at most"]),
        }
    }
}

impl Lexicons {
    pub fn new(asc: Vec<String>, desc: Vec<String>, limit: Vec<String>) -> Result<Self, LexiconError> {
        for (name, list) in [("asc", &asc), ("desc", &desc), ("limit", &limit)] {
            if list.is_empty() {
                return Err(LexiconError::Empty(name));
            }
            if let Some(bad) = list.iter().find(|e| e.trim().is_empty() || e.to_lowercase() != **e) {
                return Err(LexiconError::BadEntry {
                    list: name,
                    entry: bad.clone(),
                });
            }
        }
        Ok(Lexicons { asc, desc, limit })
    }

    pub fn asc(&self) -> &[String] {
        &self.asc
    }

    pub fn desc(&self) -> &[String] {
        &self.desc
    }

    pub fn limit(&self) -> &[String] {
        &self.limit
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub lexicons: Lexicons,
    /// Also require table and column names to appear in the question.
    pub identifiers_are_terminals: bool,
}

fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// Whether any entry occurs in `nl_words` as a run of whole words.
fn mentions(nl_words: &[String], entries: &[String]) -> bool {
    entries.iter().any(|e| {
        let phrase = words(e);
        !phrase.is_empty() && nl_words.windows(phrase.len()).any(|w| w == phrase.as_slice())
    })
}

fn literal_text(l: &Literal) -> String {
    match l {
        Literal::Text(s) => s.clone(),
        Literal::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// Terminal strings the question should contain: literals and LIMIT
/// counts, plus identifiers when configured.
fn terminals(ast: &SqlAst, identifiers: bool) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(w) = &ast.where_clause {
        for cmp in w.comparisons() {
            if let Operand::Literal(l) = &cmp.right {
                out.push(literal_text(l));
            }
        }
    }
    if let Some(n) = ast.limit {
        out.push(n.to_string());
    }
    if identifiers {
        out.extend(ast.tables().map(str::to_string));
        for c in ast.column_refs() {
            out.push(c.column.clone());
            out.extend(c.table.clone());
        }
    }
    out
}

pub fn extract_features(
    nl: &str,
    sql_text: &str,
    work_time_s: f64,
    config: &FeatureConfig,
) -> Result<FeatureVector, QualityError> {
    if !(work_time_s.is_finite() && work_time_s >= 0.0) {
        return Err(QualityError::InvalidWorkTime(work_time_s));
    }
    let ast = parse(sql_text)?;
    Ok(features_of(nl, &ast, work_time_s, config))
}

pub fn features_of(nl: &str, ast: &SqlAst, work_time_s: f64, config: &FeatureConfig) -> FeatureVector {
    let nl_lower = nl.to_lowercase();
    let nl_words = words(nl);
    let complexity = hardness(ast);
    let terminals_in_nl = terminals(ast, config.identifiers_are_terminals)
        .iter()
        .all(|t| nl_lower.contains(&t.to_lowercase()));
    let order_by_direction_match = [Direction::Asc, Direction::Desc].iter().all(|dir| {
        !ast.order_by.iter().any(|o| o.direction == *dir)
            || mentions(
                &nl_words,
                match dir {
                    Direction::Asc => config.lexicons.asc(),
                    Direction::Desc => config.lexicons.desc(),
                },
            )
    });
    let limit_words_present = ast.limit.is_none() || mentions(&nl_words, config.lexicons.limit());
    FeatureVector {
        work_time_s,
        has_more_than_two_words: nl.split_whitespace().count() > 2,
        terminals_in_nl,
        sql_complexity: complexity,
        time_per_complexity: work_time_s / f64::from(complexity.code()),
        levenshtein_nl_sql: levenshtein(nl, &serialize(ast)),
        order_by_direction_match,
        limit_words_present,
    }
}
