use num_traits::{One, Zero};

use super::{factorial, ExactRational};
use crate::error::{Error, Result};

/// Formal power series truncated after the coefficient of `x^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<ExactRational>,
}

impl PowerSeries {
    /// Coefficients `a_0, a_1, ...`; the truncation order is `len - 1`.
    pub fn new(coeffs: Vec<ExactRational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series keeps at least its constant term");
        Self { coeffs }
    }

    /// `exp(scale * x)` up to `x^order`.
    pub fn exp_scaled(scale: &ExactRational, order: usize) -> Self {
        let mut power = ExactRational::one();
        let coeffs = (0..=order)
            .map(|k| {
                let c = &power / ExactRational::from_integer(factorial(k));
                power *= scale;
                c
            })
            .collect();
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &ExactRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn mul(&self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![ExactRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        PowerSeries { coeffs }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<PowerSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::invalid("power series with zero constant term has no reciprocal"));
        }
        let inv0 = self.coeffs[0].recip();
        let mut out = vec![inv0.clone()];
        for n in 1..=self.order() {
            let s: ExactRational = (1..=n).map(|k| &self.coeffs[k] * &out[n - k]).sum();
            out.push(-s * &inv0);
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// Compositional inverse of a series `a_1 x + a_2 x^2 + ...` with
    /// `a_0 = 0` and `a_1 != 0`, by Lagrange inversion:
    /// `[x^n] f^{-1} = (1/n) [w^{n-1}] (w / f(w))^n`.
    pub fn lagrange_inverse(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_zero() || self.order() == 0 || self.coeffs[1].is_zero() {
            return Err(Error::invalid(
                "Lagrange inversion needs zero constant term and nonzero linear term",
            ));
        }
        let order = self.order();
        // f(w)/w truncated to w^{order-1}, then phi = w/f(w).
        let shifted = PowerSeries::new(self.coeffs[1..].to_vec());
        let phi = shifted.reciprocal()?;
        let mut coeffs = vec![ExactRational::zero(); order + 1];
        let mut power = PowerSeries::new(vec![ExactRational::one()]);
        let mut phi_trunc = phi.clone();
        phi_trunc.coeffs.truncate(order);
        power.coeffs.resize(order, ExactRational::zero());
        for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
            power = power.mul(&phi_trunc);
            *slot = power.coeffs[n - 1].clone() / ExactRational::from_integer((n as i64).into());
        }
        Ok(PowerSeries { coeffs })
    }
}
