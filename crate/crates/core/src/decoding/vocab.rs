use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mask::TokenTrie;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("vocabulary is empty")]
    Empty,
    #[error("sentinel index {0} out of range")]
    SentinelOutOfRange(usize),
    #[error("eos and bos share index {0}")]
    SentinelClash(usize),
    #[error("token {0} is empty")]
    EmptyToken(usize),
}

/// Ordered token strings. Detokenization is verbatim concatenation, so
/// whitespace lives inside tokens. The eos (and optional bos) entries are
/// sentinels and never contribute text.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawVocab", into = "RawVocab")]
pub struct Vocabulary {
    tokens: Vec<String>,
    eos: usize,
    bos: Option<usize>,
    trie: OnceLock<TokenTrie>,
}

#[derive(Serialize, Deserialize)]
struct RawVocab {
    tokens: Vec<String>,
    eos: usize,
    #[serde(default)]
    bos: Option<usize>,
}

impl TryFrom<RawVocab> for Vocabulary {
    type Error = VocabError;

    fn try_from(raw: RawVocab) -> Result<Self, Self::Error> {
        Vocabulary::new(raw.tokens, raw.eos, raw.bos)
    }
}

impl From<Vocabulary> for RawVocab {
    fn from(v: Vocabulary) -> Self {
        RawVocab {
            tokens: v.tokens,
            eos: v.eos,
            bos: v.bos,
        }
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && self.eos == other.eos && self.bos == other.bos
    }
}

impl Vocabulary {
    pub fn new(tokens: Vec<String>, eos: usize, bos: Option<usize>) -> Result<Self, VocabError> {
        if tokens.is_empty() {
            return Err(VocabError::Empty);
        }
        for idx in std::iter::once(eos).chain(bos) {
            if idx >= tokens.len() {
                return Err(VocabError::SentinelOutOfRange(idx));
            }
        }
        if bos == Some(eos) {
            return Err(VocabError::SentinelClash(eos));
        }
        if let Some(i) = (0..tokens.len()).find(|&i| i != eos && Some(i) != bos && tokens[i].is_empty()) {
            return Err(VocabError::EmptyToken(i));
        }
        Ok(Vocabulary {
            tokens,
            eos,
            bos,
            trie: OnceLock::new(),
        })
    }

    /// Appends an `</s>` eos sentinel to `tokens`.
    pub fn with_eos<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Self, VocabError> {
        let mut tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let eos = tokens.len();
        tokens.push("</s>".to_string());
        Vocabulary::new(tokens, eos, None)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &str {
        &self.tokens[i]
    }

    pub fn eos(&self) -> usize {
        self.eos
    }

    pub fn bos(&self) -> Option<usize> {
        self.bos
    }

    pub fn is_sentinel(&self, i: usize) -> bool {
        i == self.eos || Some(i) == self.bos
    }

    /// Concatenates the non-sentinel tokens.
    pub fn detokenize(&self, indices: &[usize]) -> String {
        indices
            .iter()
            .filter(|&&i| !self.is_sentinel(i))
            .map(|&i| self.tokens[i].as_str())
            .collect()
    }

    pub(crate) fn trie(&self) -> &TokenTrie {
        self.trie.get_or_init(|| TokenTrie::build(self))
    }
}
