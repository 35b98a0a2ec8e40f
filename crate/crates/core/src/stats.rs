//! Small numeric helpers shared by the evaluation and telemetry reports.

use serde::{Deserialize, Serialize};

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p * n / 100)`, clamped to at least 1. `None` for an empty slice.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = (p * n as f64 / 100.0).ceil() as usize;
    Some(sorted[rank.clamp(1, n) - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyPercentiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

impl LatencyPercentiles {
    /// `None` when `samples` is empty.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(LatencyPercentiles {
            p50: percentile_nearest_rank(&sorted, 50.0)?,
            p90: percentile_nearest_rank(&sorted, 90.0)?,
            p99: percentile_nearest_rank(&sorted, 99.0)?,
        })
    }
}

pub(crate) fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let p = LatencyPercentiles::from_samples(&v).unwrap();
        assert_eq!((p.p50, p.p90, p.p99), (50.0, 90.0, 99.0));
        let p = LatencyPercentiles::from_samples(&[1.77]).unwrap();
        assert_eq!((p.p50, p.p90, p.p99), (1.77, 1.77, 1.77));
        assert_eq!(percentile_nearest_rank(&[1.0, 2.0, 3.0, 4.0], 50.0), Some(2.0));
        assert_eq!(percentile_nearest_rank(&[1.0, 2.0], 0.0), Some(1.0));
        assert!(LatencyPercentiles::from_samples(&[]).is_none());
    }
}
