//! Labeled (question, SQL) pairs for training a candidate ranker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{execution_match, Database};
use crate::grammar::{parse, serialize, SqlAst};
use crate::ted::exact_match;

use super::beam::Hypothesis;
use super::DecodeError;

/// Beam candidates per group.
pub const BEAM_CANDIDATES: usize = 11;
/// Pairs per group: beam candidates plus random training queries.
pub const RANKER_GROUP_SIZE: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankerExample {
    pub nl: String,
    pub sql: String,
    pub label: bool,
}

/// Builds one group of [`RANKER_GROUP_SIZE`] pairs: the first
/// [`BEAM_CANDIDATES`] distinct beam candidates (by canonical text), then
/// seeded samples without replacement from `random_pool` to fill the group.
/// A pair is positive when it exactly matches `gold`, or when `db` is given
/// and the two execute to the same result.
pub fn assemble_ranker_training(
    nl: &str,
    gold: &SqlAst,
    beam: &[Hypothesis],
    random_pool: &[SqlAst],
    db: Option<&Database>,
    seed: u64,
) -> Result<Vec<RankerExample>, DecodeError> {
    let mut picked: Vec<(String, Option<SqlAst>)> = Vec::new();
    for h in beam {
        if picked.len() == BEAM_CANDIDATES {
            break;
        }
        let ast = parse(&h.text).ok();
        let text = ast.as_ref().map(serialize).unwrap_or_else(|| h.text.clone());
        if !picked.iter().any(|(t, _)| *t == text) {
            picked.push((text, ast));
        }
    }
    let needed = RANKER_GROUP_SIZE - picked.len();
    if random_pool.len() < needed {
        return Err(DecodeError::InsufficientCandidates {
            needed,
            available: random_pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in rand::seq::index::sample(&mut rng, random_pool.len(), needed) {
        let ast = &random_pool[i];
        picked.push((serialize(ast), Some(ast.clone())));
    }
    Ok(picked
        .into_iter()
        .map(|(sql, ast)| {
            let label = ast.is_some_and(|ast| {
                exact_match(gold, &ast) || db.is_some_and(|db| execution_match(gold, &ast, db).unwrap_or(false))
            });
            RankerExample {
                nl: nl.to_string(),
                sql,
                label,
            }
        })
        .collect())
}
