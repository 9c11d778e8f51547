use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::{g_closed, radius, tree_q};
use crate::error::{Error, Result};
use crate::exact::{c_sequence, to_f64, ConstantTable};

pub const DEFAULT_K_MAX: usize = 120;

/// A truncated series value with a rigorous bound on the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the tail from the growth estimate `c_k <= sqrt(k) e^k`;
    /// infinite when the geometric majorant diverges.
    pub tail_bound: f64,
}

/// Evaluates `f(x) = sum_k c_k x^k` and the series for `G'` from a fixed
/// coefficient table.
#[derive(Clone, Debug)]
pub struct SeriesEvaluator {
    coeffs: Arc<Vec<f64>>,
    k_max: usize,
}

static CACHE: Mutex<Option<Arc<Vec<f64>>>> = Mutex::new(None);

fn cached_coefficients(k_max: usize) -> Result<Arc<Vec<f64>>> {
    let mut slot = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(c) = slot.as_ref() {
        if c.len() >= k_max {
            return Ok(Arc::clone(c));
        }
    }
    let c = Arc::new(c_sequence(k_max)?.iter().map(to_f64).collect::<Vec<_>>());
    *slot = Some(Arc::clone(&c));
    Ok(c)
}

/// `sum_{k > K} sqrt(k) r^k <= sqrt(K+1) r^{K+1} / (1 - rho)` where
/// `rho = sqrt((K+2)/(K+1)) r` bounds the ratio of consecutive terms.
fn growth_tail(k_max: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let k1 = (k_max + 1) as f64;
    let rho = r * ((k1 + 1.0) / k1).sqrt();
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    k1.sqrt() * r.powf(k1) / (1.0 - rho)
}

impl SeriesEvaluator {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        Ok(Self { coeffs: cached_coefficients(k_max)?, k_max })
    }

    pub fn from_table(table: &ConstantTable, k_max: usize) -> Result<Self> {
        if k_max == 0 || k_max > table.n_max {
            return Err(Error::invalid(format!(
                "k_max = {k_max} must lie in 1..={} for this table",
                table.n_max
            )));
        }
        let coeffs = table.c[..k_max].iter().map(to_f64).collect();
        Ok(Self { coeffs: Arc::new(coeffs), k_max })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    fn check_radius(x: f64) -> Result<()> {
        let r = radius();
        if !x.is_finite() || x.abs() >= r {
            return Err(Error::Divergence { x, radius: r });
        }
        Ok(())
    }

    /// `sum_{k <= k_max} c_k x^k` for `|x| < e^{-1}`.
    pub fn f(&self, x: f64) -> Result<SeriesValue> {
        Self::check_radius(x)?;
        let value = self.coeffs[..self.k_max].iter().rev().fold(0.0, |acc, c| (acc + c) * x);
        Ok(SeriesValue { value, tail_bound: growth_tail(self.k_max, std::f64::consts::E * x.abs()) })
    }

    /// `G'(t) = -G(t) e^{-t} sum_k c_k q(t)^{k-1}` for `t` in `[0, 1)`.
    pub fn gprime(&self, t: f64) -> Result<SeriesValue> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} must lie in [0, 1)")));
        }
        let x = tree_q(t);
        Self::check_radius(x)?;
        let scale = g_closed(t)? * (-t).exp();
        // sum_k c_k x^{k-1} = f(x)/x.
        let sum = self.coeffs[..self.k_max].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let tail = if x == 0.0 { 0.0 } else { growth_tail(self.k_max, std::f64::consts::E * x) / x };
        Ok(SeriesValue { value: -scale * sum, tail_bound: scale * tail })
    }
}

pub fn f_series(x: f64, k_max: usize) -> Result<SeriesValue> {
    SeriesEvaluator::new(k_max)?.f(x)
}

pub fn gprime_series(t: f64, k_max: usize) -> Result<SeriesValue> {
    SeriesEvaluator::new(k_max)?.gprime(t)
}
