use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub alpha: f64,
    /// `statistic > critical`: the samples look like different distributions.
    pub reject: bool,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic critical value
/// `sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m))`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs two non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let critical = c * ((n + m) / (n * m)).sqrt();
    KsResult { statistic: d, critical, alpha, reject: d > critical }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_have_zero_distance() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a, 0.01);
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
    }

    #[test]
    fn disjoint_samples_have_unit_distance() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = (100..150).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &b, 0.01);
        assert_eq!(r.statistic, 1.0);
        assert!(r.reject);
    }

    #[test]
    fn critical_value_at_one_percent() {
        let a = vec![0.0; 100];
        let r = ks_two_sample(&a, &a, 0.01);
        assert!((r.critical - 1.627_624 * (0.02f64).sqrt()).abs() < 1e-5);
    }
}
