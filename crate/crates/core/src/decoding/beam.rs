//! Beam search under the token mask.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::grammar::DataModelSchema;

use super::mask::valid_mask;
use super::recognizer::ParserState;
use super::vocab::Vocabulary;
use super::DecodeError;

/// Log-score source for the next token. Must return one value per vocabulary
/// entry; each finite or `-inf` (token impossible).
pub trait Scorer {
    fn score(&self, input: &str, prefix: &[usize]) -> Vec<f64>;
}

impl<F> Scorer for F
where
    F: Fn(&str, &[usize]) -> Vec<f64>,
{
    fn score(&self, input: &str, prefix: &[usize]) -> Vec<f64> {
        self(input, prefix)
    }
}

#[derive(Debug, Clone)]
pub struct Hypothesis {
    /// Tokens of `text`; the eos sentinel is not included.
    pub token_indices: Vec<usize>,
    pub text: String,
    /// Sum of token log-scores, eos included for finished hypotheses.
    pub log_score: f64,
    pub state: ParserState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    pub beam_size: usize,
    pub max_tokens: usize,
    /// Rank by mean per-token score instead of the sum.
    pub length_normalization: bool,
    /// Stop once no live hypothesis can overtake the finished ones. Only
    /// sound for scorers that never return positive values.
    pub early_stopping: bool,
}

impl BeamConfig {
    pub fn new(beam_size: usize, max_tokens: usize) -> Self {
        BeamConfig {
            beam_size,
            max_tokens,
            length_normalization: false,
            early_stopping: false,
        }
    }
}

pub fn beam_decode(
    input: &str,
    schema: &DataModelSchema,
    scorer: &dyn Scorer,
    vocab: &Vocabulary,
    beam_size: usize,
    max_tokens: usize,
) -> Result<Vec<Hypothesis>, DecodeError> {
    beam_decode_with(input, schema, scorer, vocab, &BeamConfig::new(beam_size, max_tokens))
}

struct Expansion {
    parent: usize,
    token: usize,
    len: usize,
    score: f64,
    key: f64,
}

/// Pruning order: key descending, then lower vocabulary index, then shorter
/// hypothesis, then better parent.
fn expansion_order(a: &Expansion, b: &Expansion) -> Ordering {
    b.key
        .total_cmp(&a.key)
        .then(a.token.cmp(&b.token))
        .then(a.len.cmp(&b.len))
        .then(a.parent.cmp(&b.parent))
}

fn rank_key(score: f64, len: usize, normalize: bool) -> f64 {
    if normalize && len > 0 {
        score / len as f64
    } else {
        score
    }
}

pub fn beam_decode_with(
    input: &str,
    schema: &DataModelSchema,
    scorer: &dyn Scorer,
    vocab: &Vocabulary,
    config: &BeamConfig,
) -> Result<Vec<Hypothesis>, DecodeError> {
    if config.beam_size == 0 {
        return Err(DecodeError::InvalidBeamSize);
    }
    let init = ParserState::new(Arc::new(schema.index()));
    let mut live = vec![Hypothesis {
        token_indices: Vec::new(),
        text: String::new(),
        log_score: 0.0,
        state: init,
    }];
    // Finished hypotheses with their rank key, kept sorted and capped.
    let mut finished: Vec<(f64, Hypothesis)> = Vec::new();

    for step in 0..config.max_tokens {
        let mut expansions = Vec::new();
        let mut any_allowed = false;
        for (rank, hyp) in live.iter().enumerate() {
            let mask = valid_mask(&hyp.state, vocab)?;
            let scores = scorer.score(input, &hyp.token_indices);
            if scores.len() != vocab.len() {
                return Err(DecodeError::ScoreLength {
                    expected: vocab.len(),
                    got: scores.len(),
                });
            }
            for i in mask.allowed_indices() {
                any_allowed = true;
                let s = scores[i];
                if s.is_nan() || s == f64::INFINITY {
                    return Err(DecodeError::InvalidScore(i));
                }
                if s == f64::NEG_INFINITY {
                    continue;
                }
                let len = hyp.token_indices.len() + usize::from(i != vocab.eos());
                let score = hyp.log_score + s;
                expansions.push(Expansion {
                    parent: rank,
                    token: i,
                    len,
                    score,
                    key: rank_key(score, len.max(1), config.length_normalization),
                });
            }
        }
        if !any_allowed && finished.is_empty() {
            return Err(DecodeError::NoViableToken);
        }
        expansions.sort_by(expansion_order);

        let mut next_live = Vec::with_capacity(config.beam_size);
        for e in &expansions {
            let parent = &live[e.parent];
            if e.token == vocab.eos() {
                let hyp = Hypothesis {
                    log_score: e.score,
                    ..parent.clone()
                };
                if finished.len() < config.beam_size || finished.last().is_some_and(|(k, _)| e.key > *k) {
                    finished.push((e.key, hyp));
                    finished.sort_by(|a, b| b.0.total_cmp(&a.0));
                    finished.truncate(config.beam_size);
                }
            } else if next_live.len() < config.beam_size {
                let mut hyp = parent.clone();
                hyp.token_indices.push(e.token);
                hyp.text.push_str(vocab.token(e.token));
                hyp.state.push_str(vocab.token(e.token));
                hyp.log_score = e.score;
                debug_assert!(!hyp.state.is_dead());
                next_live.push(hyp);
            }
        }
        live = next_live;
        log::debug!("beam step {step}: {} live, {} finished", live.len(), finished.len());
        if live.is_empty() {
            break;
        }
        if config.early_stopping && finished.len() == config.beam_size {
            let worst = finished.last().map(|(k, _)| *k).unwrap_or(f64::NEG_INFINITY);
            let best_live = live
                .iter()
                .map(|h| rank_key(h.log_score, h.token_indices.len(), config.length_normalization))
                .fold(f64::NEG_INFINITY, f64::max);
            if best_live <= worst {
                break;
            }
        }
    }
    if finished.is_empty() {
        return Err(if live.is_empty() {
            DecodeError::NoViableToken
        } else {
            DecodeError::MaxLengthExceeded(config.max_tokens)
        });
    }
    Ok(finished.into_iter().map(|(_, h)| h).collect())
}
