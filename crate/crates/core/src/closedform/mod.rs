//! Double-precision closed forms and the identities linking them:
//! `G(t) = sqrt(1-t) e^{-t/2}`, `K(t) = e^{t^2} G(t^2)^2 = 1 - t^2`, the
//! generating function `f` of `c_k`, `h = q^{-1}/2` with `q(u) = u e^{-u}`,
//! the series for `G'`, and an RK4 solution of the ODE for `G`.

mod ode;
mod partial;
mod series;

pub use ode::{ode_integrate, rk4_integrate};
pub use partial::{g_partial_closed, PartialDensityValue, TailReference};
pub use series::{f_series, gprime_series, SeriesEvaluator, SeriesValue, DEFAULT_K_MAX};

use crate::error::{Error, Result};

/// Convergence radius `e^{-1}` of `f` and of the inverse of `q`.
pub fn radius() -> f64 {
    (-1.0f64).exp()
}

fn check_closed_unit(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_half_open_unit(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} must lie in [0, 1)")));
    }
    Ok(())
}

/// `q(u) = u e^{-u}`.
pub fn tree_q(u: f64) -> f64 {
    u * (-u).exp()
}

/// `G(t) = sqrt(1-t) e^{-t/2}` on `[0, 1]`.
pub fn g_closed(t: f64) -> Result<f64> {
    check_closed_unit(t)?;
    Ok((1.0 - t).sqrt() * (-t / 2.0).exp())
}

/// Right-hand side of `G' = (t-2)/(2(1-t)) G`.
pub fn gprime_closed(t: f64) -> Result<f64> {
    check_half_open_unit(t)?;
    Ok((t - 2.0) / (2.0 * (1.0 - t)) * g_closed(t)?)
}

/// Tolerance for the pure closed-form identity `e^{t^2} G(t^2)^2 = 1 - t^2`:
/// eight ulps at 1.
pub const K_IDENTITY_TOLERANCE: f64 = 8.0 * f64::EPSILON;

/// `K(t) = e^{t^2} G(t^2)^2`, checked against `1 - t^2`.
pub fn k_closed(t: f64) -> Result<f64> {
    check_closed_unit(t)?;
    let s = t * t;
    let g = g_closed(s)?;
    let k = s.exp() * g * g;
    let expected = 1.0 - s;
    if (k - expected).abs() > K_IDENTITY_TOLERANCE {
        return Err(Error::Numeric(format!(
            "e^(t^2) G(t^2)^2 = {k:e} differs from 1 - t^2 = {expected:e} at t = {t}"
        )));
    }
    Ok(k)
}

/// `f(q(t)) = (2-t) t / (2(1-t))` on `[0, 1)`.
pub fn f_closed(t: f64) -> Result<f64> {
    check_half_open_unit(t)?;
    Ok((2.0 - t) * t / (2.0 * (1.0 - t)))
}

const H_RESIDUAL: f64 = 1e-14;

/// `h(x) = q^{-1}(x)/2`: solves `u e^{-u} = x` for `u` in `[0, 1)` by Newton
/// iteration kept inside a shrinking bisection bracket, since `q'(u) =
/// (1-u) e^{-u}` vanishes at `u = 1`.
pub fn h_eval(x: f64) -> Result<f64> {
    let r = radius();
    if !(0.0..r).contains(&x) {
        return Err(Error::domain(format!("x = {x} must lie in [0, e^-1)")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // Near the branch point u e^{-u} ~ e^{-1}(1 - (1-u)^2/2).
    let mut u = if x < 0.25 { x } else { (1.0 - (2.0 * (1.0 - x / r)).sqrt()).clamp(0.0, 1.0) };
    for _ in 0..200 {
        let e = (-u).exp();
        let residual = u * e - x;
        if residual == 0.0 {
            break;
        }
        if residual < 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        let slope = (1.0 - u) * e;
        let mut next = u - residual / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - u).abs() <= 4.0 * f64::EPSILON * u.max(f64::MIN_POSITIVE);
        u = next;
        if converged || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let residual = (tree_q(u) - x).abs();
    if residual > H_RESIDUAL {
        return Err(Error::Numeric(format!("h({x}): residual {residual:e} after iteration")));
    }
    Ok(u / 2.0)
}
