//! Reference scorers standing in for a neural generator.

use std::collections::HashMap;

use super::beam::Scorer;
use super::vocab::Vocabulary;

/// Every token equally likely.
#[derive(Debug, Clone, Copy)]
pub struct UniformScorer {
    vocab_len: usize,
}

impl UniformScorer {
    pub fn new(vocab: &Vocabulary) -> Self {
        UniformScorer { vocab_len: vocab.len() }
    }
}

impl Scorer for UniformScorer {
    fn score(&self, _input: &str, _prefix: &[usize]) -> Vec<f64> {
        vec![-(self.vocab_len as f64).ln(); self.vocab_len]
    }
}

const START: char = '\u{2}';
const END: char = '\u{3}';

/// Interpolation weights of the trigram, bigram and unigram estimates.
const LAMBDAS: [f64; 3] = [0.6, 0.3, 0.1];

/// Character trigram model over SQL text. Trigram and bigram maximum
/// likelihood estimates are interpolated with an add-one unigram; a
/// component whose context never occurred in training drops out and the
/// remaining weights are renormalized. A token scores the log-probability
/// of its characters given the text so far; eos scores an end marker. The
/// question is ignored.
#[derive(Debug, Clone)]
pub struct CharTrigramScorer {
    vocab: Vocabulary,
    trigrams: HashMap<(char, char, char), u32>,
    trigram_contexts: HashMap<(char, char), u32>,
    bigrams: HashMap<(char, char), u32>,
    bigram_contexts: HashMap<char, u32>,
    unigrams: HashMap<char, u32>,
    total: u32,
    alphabet: usize,
}

impl CharTrigramScorer {
    pub fn train<S: AsRef<str>>(vocab: Vocabulary, corpus: &[S]) -> Self {
        let mut m = CharTrigramScorer {
            vocab,
            trigrams: HashMap::new(),
            trigram_contexts: HashMap::new(),
            bigrams: HashMap::new(),
            bigram_contexts: HashMap::new(),
            unigrams: HashMap::new(),
            total: 0,
            alphabet: 0,
        };
        let mut chars = std::collections::HashSet::new();
        chars.insert(END);
        for text in corpus {
            let mut a = START;
            let mut b = START;
            for c in text.as_ref().chars().chain(std::iter::once(END)) {
                chars.insert(c);
                *m.trigrams.entry((a, b, c)).or_insert(0) += 1;
                *m.trigram_contexts.entry((a, b)).or_insert(0) += 1;
                *m.bigrams.entry((b, c)).or_insert(0) += 1;
                *m.bigram_contexts.entry(b).or_insert(0) += 1;
                *m.unigrams.entry(c).or_insert(0) += 1;
                m.total += 1;
                a = b;
                b = c;
            }
        }
        for (i, tok) in m.vocab.tokens().iter().enumerate() {
            if !m.vocab.is_sentinel(i) {
                chars.extend(tok.chars());
            }
        }
        m.alphabet = chars.len();
        m
    }

    fn char_logprob(&self, a: char, b: char, c: char) -> f64 {
        let count = |n: Option<&u32>| f64::from(n.copied().unwrap_or(0));
        let unigram = (count(self.unigrams.get(&c)) + 1.0) / (f64::from(self.total) + self.alphabet as f64);
        let mut p = LAMBDAS[2] * unigram;
        let mut weight = LAMBDAS[2];
        let bi_ctx = count(self.bigram_contexts.get(&b));
        if bi_ctx > 0.0 {
            p += LAMBDAS[1] * count(self.bigrams.get(&(b, c))) / bi_ctx;
            weight += LAMBDAS[1];
        }
        let tri_ctx = count(self.trigram_contexts.get(&(a, b)));
        if tri_ctx > 0.0 {
            p += LAMBDAS[0] * count(self.trigrams.get(&(a, b, c))) / tri_ctx;
            weight += LAMBDAS[0];
        }
        (p / weight).ln()
    }
}

impl Scorer for CharTrigramScorer {
    fn score(&self, _input: &str, prefix: &[usize]) -> Vec<f64> {
        let text = self.vocab.detokenize(prefix);
        let mut tail = [START, START];
        for c in text.chars() {
            tail = [tail[1], c];
        }
        (0..self.vocab.len())
            .map(|i| {
                if i == self.vocab.eos() {
                    return self.char_logprob(tail[0], tail[1], END);
                }
                if self.vocab.is_sentinel(i) {
                    return f64::NEG_INFINITY;
                }
                let [mut a, mut b] = tail;
                let mut total = 0.0;
                for c in self.vocab.token(i).chars() {
                    total += self.char_logprob(a, b, c);
                    a = b;
                    b = c;
                }
                total
            })
            .collect()
    }
}
