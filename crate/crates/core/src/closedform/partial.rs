use serde::Serialize;

use super::g_closed;
use crate::error::{Error, Result};
use crate::exact::{c_sequence, to_f64};

/// Source for `G_{n-k}(t)` when it is not `e^{-t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailReference {
    /// A Monte Carlo estimate of `G_{n-k}(t)`.
    Estimate { mean: f64, stderr: f64 },
    /// Substitute the limit `G(t)`; only accurate for large `n - k`.
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartialDensityValue {
    pub value: f64,
    /// Propagated from the `G_{n-k}` reference; zero when it is exact.
    pub stderr: f64,
    /// Set when the limit `G` stood in for `G_{n-k}`.
    pub biased: bool,
}

/// `g_n^(k)(t) = c_k (t e^{-t})^{k-1} G_{n-k}(t) e^{-t}` for `1 <= k <= n-1`.
/// Exact when `n - k = 1`, where `G_1(t) = e^{-t}`.
pub fn g_partial_closed(n: usize, k: usize, t: f64, tail: Option<TailReference>) -> Result<PartialDensityValue> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    if k == n {
        return Err(Error::Unsupported(format!(
            "g_n^(n) has no closed form in terms of G_m (n = {n})"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be finite and non-negative")));
    }
    let m = n - k;
    let (g_tail, stderr, biased) = if m == 1 {
        ((-t).exp(), 0.0, false)
    } else {
        match tail {
            Some(TailReference::Estimate { mean, stderr }) => (mean, stderr, false),
            Some(TailReference::Limit) => (g_closed(t)?, 0.0, true),
            None => {
                return Err(Error::invalid(format!(
                    "G_{m} has no closed form; supply an estimate or the limit"
                )))
            }
        }
    };
    let c_k = to_f64(&c_sequence(k)?[k - 1]);
    let factor = c_k * (t * (-t).exp()).powi(k as i32 - 1) * (-t).exp();
    Ok(PartialDensityValue { value: factor * g_tail, stderr: factor * stderr, biased })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_is_exact() {
        let v = g_partial_closed(2, 1, 0.5, None).unwrap();
        assert!((v.value - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(v.stderr, 0.0);
        assert!(!v.biased);
    }

    #[test]
    fn n3_k2_uses_c2() {
        let t: f64 = 0.4;
        let v = g_partial_closed(3, 2, t, None).unwrap();
        let want = 1.5 * t * (-t).exp() * (-2.0 * t).exp();
        assert!((v.value - want).abs() < 1e-15);
    }

    #[test]
    fn references_and_errors() {
        assert!(matches!(g_partial_closed(3, 3, 0.5, None), Err(Error::Unsupported(_))));
        assert!(g_partial_closed(3, 0, 0.5, None).is_err());
        assert!(g_partial_closed(4, 1, 0.5, None).is_err());
        let lim = g_partial_closed(4, 1, 0.5, Some(TailReference::Limit)).unwrap();
        assert!(lim.biased);
        let est = g_partial_closed(4, 1, 0.5, Some(TailReference::Estimate { mean: 0.6, stderr: 0.01 })).unwrap();
        assert!((est.value - 0.6 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((est.stderr - 0.01 * (-0.5f64).exp()).abs() < 1e-15);
    }
}
