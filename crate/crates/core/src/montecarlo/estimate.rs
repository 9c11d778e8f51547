use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A Monte Carlo result. Reproducible from `(seed, samples, estimator,
/// params)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimator: String,
    pub params: BTreeMap<String, f64>,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MCEstimate {
    pub fn new(estimator: &str, params: &[(&str, f64)], mean: f64, stderr: f64, samples: u64, seed: u64) -> Self {
        Self {
            estimator: estimator.to_owned(),
            params: params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            mean,
            stderr,
            samples,
            seed,
            notes: Vec::new(),
        }
    }

    /// Proportion estimate with binomial standard error.
    pub fn from_bernoulli(
        estimator: &str,
        params: &[(&str, f64)],
        successes: u64,
        samples: u64,
        seed: u64,
    ) -> Self {
        let p = successes as f64 / samples as f64;
        let stderr = (p * (1.0 - p) / samples as f64).sqrt();
        Self::new(estimator, params, p, stderr, samples, seed)
    }

    /// Linear rescaling `scale * X`.
    pub fn scaled(mut self, scale: f64) -> Self {
        self.mean *= scale;
        self.stderr *= scale.abs();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// `mean -/+ z * stderr`.
    pub fn confidence_interval(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.stderr, self.mean + z * self.stderr)
    }

    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.mean - reference;
        if self.stderr == 0.0 {
            if d == 0.0 { 0.0 } else { f64::INFINITY * d.signum() }
        } else {
            d / self.stderr
        }
    }

    pub fn within_sigmas(&self, reference: f64, sigmas: f64) -> bool {
        (self.mean - reference).abs() <= sigmas * self.stderr
    }

    /// `sqrt(se_a^2 + se_b^2)` for independent estimates.
    pub fn combined_stderr(&self, other: &MCEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_stderr() {
        let e = MCEstimate::from_bernoulli("x", &[("t", 0.5)], 250, 1000, 9);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.param("t"), Some(0.5));
    }

    #[test]
    fn degenerate_proportion_has_zero_stderr() {
        let e = MCEstimate::from_bernoulli("x", &[], 10, 10, 0);
        assert_eq!(e.stderr, 0.0);
        assert!(e.within_sigmas(1.0, 4.0));
        assert!(!e.within_sigmas(0.999, 4.0));
        assert_eq!(e.z_score(1.0), 0.0);
    }

    #[test]
    fn interval_and_scaling() {
        let e = MCEstimate::new("x", &[], 1.0, 0.1, 100, 0).scaled(-2.0);
        assert_eq!(e.mean, -2.0);
        assert!((e.stderr - 0.2).abs() < 1e-15);
        let (lo, hi) = e.confidence_interval(2.0);
        assert!((lo + 2.4).abs() < 1e-12 && (hi + 1.6).abs() < 1e-12);
    }
}
