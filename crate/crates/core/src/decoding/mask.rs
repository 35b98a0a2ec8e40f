//! Token masks.
//!
//! Rather than advancing a copy of the state once per token, the mask walks a
//! character trie of the vocabulary depth-first and stops descending as soon
//! as the state dies, so shared token prefixes are consumed once.

use serde::{Deserialize, Serialize};

use super::recognizer::ParserState;
use super::vocab::Vocabulary;
use super::DecodeError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMask {
    pub allowed: Vec<bool>,
}

impl TokenMask {
    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn is_allowed(&self, i: usize) -> bool {
        self.allowed[i]
    }

    pub fn allowed_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.allowed.iter().enumerate().filter_map(|(i, &a)| a.then_some(i))
    }

    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|&&a| a).count()
    }
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: Vec<(char, usize)>,
    /// Vocabulary indices whose text ends here.
    tokens: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct TokenTrie {
    nodes: Vec<TrieNode>,
}

impl TokenTrie {
    pub(crate) fn build(vocab: &Vocabulary) -> Self {
        let mut nodes = vec![TrieNode::default()];
        for (i, tok) in vocab.tokens().iter().enumerate() {
            if vocab.is_sentinel(i) {
                continue;
            }
            let mut at = 0;
            for c in tok.chars() {
                at = match nodes[at].children.iter().find(|(k, _)| *k == c) {
                    Some(&(_, next)) => next,
                    None => {
                        nodes.push(TrieNode::default());
                        let next = nodes.len() - 1;
                        nodes[at].children.push((c, next));
                        next
                    }
                };
            }
            nodes[at].tokens.push(i);
        }
        TokenTrie { nodes }
    }
}

/// `allowed[i]` iff advancing `state` by token `i` is not dead; eos iff
/// `state` is complete.
pub fn valid_mask(state: &ParserState, vocab: &Vocabulary) -> Result<TokenMask, DecodeError> {
    if state.is_dead() {
        return Err(DecodeError::DeadState);
    }
    let trie = vocab.trie();
    let mut allowed = vec![false; vocab.len()];
    allowed[vocab.eos()] = state.is_complete();
    let mut stack: Vec<(usize, ParserState)> = vec![(0, state.clone())];
    while let Some((node, st)) = stack.pop() {
        let n = &trie.nodes[node];
        for &i in &n.tokens {
            allowed[i] = true;
        }
        for &(c, child) in &n.children {
            let mut next = st.clone();
            if next.push_char_unsettled(c) {
                stack.push((child, next));
            }
        }
    }
    Ok(TokenMask { allowed })
}
