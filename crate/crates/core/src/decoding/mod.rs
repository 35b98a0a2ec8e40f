//! Grammar-constrained decoding: prefix recognition, token masks, beam search
//! and candidate re-ranking.

mod beam;
mod mask;
mod ranker_data;
mod recognizer;
mod rerank;
pub mod scorers;
mod vocab;

use thiserror::Error;

pub use beam::{beam_decode, beam_decode_with, BeamConfig, Hypothesis, Scorer};
pub use mask::{valid_mask, TokenMask};
pub use ranker_data::{assemble_ranker_training, RankerExample, BEAM_CANDIDATES, RANKER_GROUP_SIZE};
pub use recognizer::{init_state, ParserState, Viability};
pub use rerank::{rerank, Ranker};
pub use vocab::{VocabError, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("state is dead: no continuation can produce a valid query")]
    DeadState,
    #[error("no vocabulary token is allowed for any live hypothesis")]
    NoViableToken,
    #[error("no hypothesis finished within {0} tokens")]
    MaxLengthExceeded(usize),
    #[error("beam size must be at least 1")]
    InvalidBeamSize,
    #[error("scorer returned {got} scores for a vocabulary of {expected}")]
    ScoreLength { expected: usize, got: usize },
    #[error("scorer returned a NaN or +inf score for token {0}")]
    InvalidScore(usize),
    #[error("need {needed} candidates but only {available} are available")]
    InsufficientCandidates { needed: usize, available: usize },
}
