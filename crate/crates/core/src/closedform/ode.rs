use crate::curve::Curve;
use crate::error::{Error, Result};

/// Classical fourth-order Runge-Kutta for `y' = rhs(t, y)` from `(t0, y0)` to
/// `t_end`; the last step is shortened to land on `t_end` exactly. Grid
/// points are `t0 + i * step`, not accumulated sums.
pub fn rk4_integrate<F>(rhs: F, t0: f64, y0: f64, t_end: f64, step: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step must be positive and finite, got {step}")));
    }
    if !(t_end >= t0) {
        return Err(Error::invalid(format!("t_end = {t_end} lies before t0 = {t0}")));
    }
    let mut out = vec![(t0, y0)];
    let (mut t, mut y) = (t0, y0);
    let mut i = 0u64;
    while t < t_end {
        i += 1;
        let mut next = t0 + i as f64 * step;
        if next > t_end || t_end - next < 1e-12 * step {
            next = t_end;
        }
        let h = next - t;
        let k1 = rhs(t, y)?;
        let k2 = rhs(t + h / 2.0, y + h / 2.0 * k1)?;
        let k3 = rhs(t + h / 2.0, y + h / 2.0 * k2)?;
        let k4 = rhs(next, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = next;
        out.push((t, y));
    }
    Ok(out)
}

/// Integrates `G' = (t-2)/(2(1-t)) G`, `G(0) = 1`, on `[0, t_end]` with
/// `t_end < 1`.
pub fn ode_integrate(t_end: f64, step: f64) -> Result<Curve> {
    if !(0.0..1.0).contains(&t_end) {
        return Err(Error::domain(format!("t_end = {t_end} must lie in [0, 1)")));
    }
    let points = rk4_integrate(|t, g| Ok((t - 2.0) / (2.0 * (1.0 - t)) * g), 0.0, 1.0, t_end, step)?;
    Curve::new("G_rk4", points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::g_closed;

    #[test]
    fn starts_at_one_and_tracks_g() {
        let c = ode_integrate(0.5, 1e-3).unwrap();
        assert_eq!(c.first().unwrap().value, 1.0);
        assert_eq!(c.last().unwrap().t, 0.5);
        assert_eq!(c.len(), 501);
        assert!(c.max_abs_deviation(|t| g_closed(t).unwrap()) < 1e-12);
    }

    #[test]
    fn short_last_step() {
        let c = ode_integrate(0.0105, 1e-3).unwrap();
        assert_eq!(c.len(), 12);
        assert_eq!(c.last().unwrap().t, 0.0105);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert_eq!(ode_integrate(0.0, 1e-3).unwrap().len(), 1);
        assert!(ode_integrate(1.0, 1e-3).is_err());
        assert!(ode_integrate(0.5, 0.0).is_err());
        assert!(ode_integrate(0.5, f64::NAN).is_err());
    }

    #[test]
    fn rk4_exact_on_cubic() {
        let pts = rk4_integrate(|t, _| Ok(3.0 * t * t), 0.0, 0.0, 1.0, 0.1).unwrap();
        assert!((pts.last().unwrap().1 - 1.0).abs() < 1e-14);
    }
}
