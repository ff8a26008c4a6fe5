//! Trial statistics and machine-readable run reports.
//!
//! Completeness 1 - eps is estimated on shifted instances, soundness error
//! delta on independent ones; both come with exact (Clopper-Pearson)
//! binomial confidence intervals. Reports serialize as single JSON objects,
//! one per line, so runs diff cleanly.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

/// Exact binomial (Clopper-Pearson) confidence interval for k successes in
/// n trials at the given confidence level.
pub fn exact_binomial_ci(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(k <= n && n > 0, "need 0 <= k <= n, n > 0");
    let alpha = 1.0 - confidence;
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64)
            .expect("valid parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64)
            .expect("valid parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Outcome statistics for a batch of seeded trials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialReport {
    pub trials: u64,
    pub successes: u64,
    /// estimated completeness 1 - eps (success rate on shifted instances),
    /// when the batch ran shifted instances
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completeness: Option<f64>,
    /// estimated soundness error delta (false-accept rate on independent
    /// instances), when the batch ran independent instances
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soundness_error: Option<f64>,
    /// 95% exact binomial CI on the success rate
    pub ci_low: f64,
    pub ci_high: f64,
    pub oracle_queries: u64,
    pub wall_ms: u64,
}

impl TrialReport {
    pub fn from_counts(trials: u64, successes: u64, shifted_batch: bool) -> TrialReport {
        let rate = successes as f64 / trials.max(1) as f64;
        let (lo, hi) = if trials > 0 {
            exact_binomial_ci(successes, trials, 0.95)
        } else {
            (0.0, 1.0)
        };
        TrialReport {
            trials,
            successes,
            completeness: shifted_batch.then_some(rate),
            soundness_error: (!shifted_batch).then_some(1.0 - rate),
            ci_low: lo,
            ci_high: hi,
            oracle_queries: 0,
            wall_ms: 0,
        }
    }

    pub fn with_queries(mut self, q: u64) -> Self {
        self.oracle_queries = q;
        self
    }

    pub fn with_wall_ms(mut self, ms: u64) -> Self {
        self.wall_ms = ms;
        self
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials.max(1) as f64
    }

    /// Merge two reports by exact summation (parallel trial batches).
    pub fn merge(&self, other: &TrialReport) -> TrialReport {
        let mut merged = TrialReport::from_counts(
            self.trials + other.trials,
            self.successes + other.successes,
            self.completeness.is_some(),
        );
        merged.oracle_queries = self.oracle_queries + other.oracle_queries;
        merged.wall_ms = self.wall_ms.max(other.wall_ms);
        merged
    }
}

/// Everything that determines a CLI run. Serialized into every summary line
/// for provenance; two runs with equal configs produce identical non-timing
/// output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub threads: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_known_values() {
        // 8/10 successes at 95%: the standard CP interval ~ (0.444, 0.975)
        let (lo, hi) = exact_binomial_ci(8, 10, 0.95);
        assert!((lo - 0.4439).abs() < 5e-3, "lo = {lo}");
        assert!((hi - 0.9748).abs() < 5e-3, "hi = {hi}");
        // extremes are exact
        assert_eq!(exact_binomial_ci(0, 20, 0.95).0, 0.0);
        assert_eq!(exact_binomial_ci(20, 20, 0.95).1, 1.0);
    }

    #[test]
    fn interval_contains_point_estimate() {
        for (k, n) in [(0u64, 5u64), (3, 7), (50, 50), (499, 1000)] {
            let (lo, hi) = exact_binomial_ci(k, n, 0.95);
            let p = k as f64 / n as f64;
            assert!(lo <= p + 1e-12 && p <= hi + 1e-12, "({k}, {n})");
        }
    }

    #[test]
    fn merge_sums_exactly() {
        let a = TrialReport::from_counts(100, 90, true).with_queries(5);
        let b = TrialReport::from_counts(50, 50, true).with_queries(7);
        let m = a.merge(&b);
        assert_eq!(m.trials, 150);
        assert_eq!(m.successes, 140);
        assert_eq!(m.oracle_queries, 12);
        assert!((m.completeness.unwrap() - 140.0 / 150.0).abs() < 1e-12);
    }

    #[test]
    fn report_json_shape() {
        let r = TrialReport::from_counts(10, 9, false);
        let j = serde_json::to_value(&r).unwrap();
        assert!(j.get("completeness").is_none());
        assert!((j["soundness_error"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    }
}
