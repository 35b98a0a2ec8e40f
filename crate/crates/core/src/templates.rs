//! Query templates: extraction, corpus distribution and proportional sampling.

use std::collections::BTreeMap;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grammar::{render, SqlAst, Style};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Canonical query text with `[TABLE]`, `[COL]` and `[VAL]` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Template {
    pub text: String,
    /// Lowercase hex SHA-256 of `text`.
    pub structural_hash: String,
}

impl Template {
    pub fn new(text: String) -> Self {
        let digest = Sha256::digest(text.as_bytes());
        let mut hash = String::with_capacity(64);
        for b in digest.iter() {
            write!(hash, "{b:02x}").expect("writing to a String cannot fail");
        }
        Template {
            text,
            structural_hash: hash,
        }
    }
}

/// Replaces tables, column references, literals and the LIMIT count with
/// placeholders; everything else is kept.
pub fn extract_template(ast: &SqlAst) -> Template {
    Template::new(render(ast, Style::Template))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemplateEntry {
    pub count: usize,
    pub frequency: f64,
}

/// Template text → count and frequency, ordered by text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateDistribution {
    pub entries: BTreeMap<String, TemplateEntry>,
}

impl TemplateDistribution {
    pub fn total(&self) -> usize {
        self.entries.values().map(|e| e.count).sum()
    }

    /// Splits `n` into per-template quotas by largest remainder. Quotas sum
    /// to `n`; remainder ties go to the lexicographically smaller template.
    pub fn apportion(&self, n: usize) -> BTreeMap<String, usize> {
        let total = self.total() as u128;
        let mut quotas = BTreeMap::new();
        let mut remainders = Vec::new();
        let mut assigned = 0usize;
        for (text, e) in &self.entries {
            let share = n as u128 * e.count as u128;
            let q = (share / total) as usize;
            assigned += q;
            quotas.insert(text.clone(), q);
            remainders.push((share % total, text));
        }
        remainders.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        for (_, text) in remainders.into_iter().take(n - assigned) {
            *quotas.get_mut(text).expect("present") += 1;
        }
        quotas
    }
}

pub fn template_distribution(corpus: &[SqlAst]) -> Result<TemplateDistribution, TemplateError> {
    if corpus.is_empty() {
        return Err(TemplateError::EmptyCorpus);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for ast in corpus {
        *counts.entry(extract_template(ast).text).or_insert(0) += 1;
    }
    let total = corpus.len() as f64;
    Ok(TemplateDistribution {
        entries: counts
            .into_iter()
            .map(|(t, count)| {
                (
                    t,
                    TemplateEntry {
                        count,
                        frequency: count as f64 / total,
                    },
                )
            })
            .collect(),
    })
}

/// Draws `n` queries so that template counts follow the corpus distribution
/// (largest-remainder quotas). Within a template, queries are drawn without
/// replacement, or with replacement when the quota exceeds the template's
/// population. The result is shuffled; the same seed gives the same output.
pub fn sample_by_distribution(corpus: &[SqlAst], n: usize, seed: u64) -> Result<Vec<SqlAst>, TemplateError> {
    let dist = template_distribution(corpus)?;
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, ast) in corpus.iter().enumerate() {
        members.entry(extract_template(ast).text).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for (text, quota) in dist.apportion(n) {
        let pool = &members[&text];
        if quota <= pool.len() {
            for i in rand::seq::index::sample(&mut rng, pool.len(), quota) {
                out.push(corpus[pool[i]].clone());
            }
        } else {
            for _ in 0..quota {
                out.push(corpus[pool[rng.gen_range(0..pool.len())]].clone());
            }
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse;

    fn q(s: &str) -> SqlAst {
        parse(s).unwrap()
    }

    #[test]
    fn extraction() {
        assert_eq!(
            extract_template(&q("SELECT * FROM User JOIN Account ON User.id = Account.user_id")).text,
            "SELECT * FROM [TABLE] JOIN [TABLE] ON [COL] = [COL]"
        );
        assert_eq!(
            extract_template(&q("SELECT COUNT(*) FROM cars_data WHERE cylinders > 4")).text,
            "SELECT COUNT(*) FROM [TABLE] WHERE [COL] > [VAL]"
        );
        assert_eq!(
            extract_template(&q("SELECT a, MAX(b) FROM t GROUP BY a ORDER BY a DESC LIMIT 3")).text,
            "SELECT [COL], MAX([COL]) FROM [TABLE] GROUP BY [COL] ORDER BY [COL] DESC LIMIT [VAL]"
        );
        let a = extract_template(&q("SELECT x FROM t WHERE y = 'a'"));
        let b = extract_template(&q("SELECT z FROM u WHERE w = 3"));
        assert_eq!(a, b);
        assert_eq!(a.structural_hash.len(), 64);
    }

    #[test]
    fn distribution_and_quotas() {
        let a = q("SELECT a FROM t");
        let b = q("SELECT * FROM t");
        let corpus = vec![a.clone(), a.clone(), a.clone(), b.clone()];
        let d = template_distribution(&corpus).unwrap();
        assert_eq!(d.entries["SELECT [COL] FROM [TABLE]"].frequency, 0.75);
        assert_eq!(d.entries["SELECT * FROM [TABLE]"].frequency, 0.25);
        let s = sample_by_distribution(&corpus, 8, 3).unwrap();
        assert_eq!(s.iter().filter(|x| **x == a).count(), 6);
        assert_eq!(s.iter().filter(|x| **x == b).count(), 2);
        assert_eq!(s, sample_by_distribution(&corpus, 8, 3).unwrap());
        assert_eq!(template_distribution(&[]), Err(TemplateError::EmptyCorpus));
    }

    #[test]
    fn remainder_ties_break_by_text() {
        let corpus = vec![q("SELECT a FROM t"), q("SELECT * FROM t")];
        let quotas = template_distribution(&corpus).unwrap().apportion(1);
        assert_eq!(quotas["SELECT * FROM [TABLE]"], 1);
        assert_eq!(quotas["SELECT [COL] FROM [TABLE]"], 0);
    }
}
