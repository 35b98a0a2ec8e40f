use super::beam::Hypothesis;

/// Scores how well a SQL string answers a question; higher is better.
pub trait Ranker {
    fn score(&self, nl: &str, sql: &str) -> f64;
}

impl<F> Ranker for F
where
    F: Fn(&str, &str) -> f64,
{
    fn score(&self, nl: &str, sql: &str) -> f64 {
        self(nl, sql)
    }
}

/// Stable sort by descending ranker score. NaN scores sort last.
pub fn rerank(nl: &str, candidates: Vec<Hypothesis>, ranker: &dyn Ranker) -> Vec<Hypothesis> {
    let mut scored: Vec<(f64, Hypothesis)> = candidates
        .into_iter()
        .map(|h| {
            let s = ranker.score(nl, &h.text);
            (if s.is_nan() { f64::NEG_INFINITY } else { s }, h)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.into_iter().map(|(_, h)| h).collect()
}
