use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::{factorial, integer, rational, ExactRational, PowerSeries};
use crate::error::{Error, Result};

fn require_n_max(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    Ok(())
}

fn fact(n: usize) -> ExactRational {
    ExactRational::from_integer(factorial(n))
}

/// `c_1 = 1`, `c_n = n(n+1)/(n-1) * sum_{k<n} c_k c_{n-k} / ((k+1)(n-k+1))`.
/// Index 0 of the returned vector holds `c_1`.
pub fn c_sequence(n_max: usize) -> Result<Vec<ExactRational>> {
    require_n_max(n_max)?;
    let mut c: Vec<ExactRational> = vec![integer(1)];
    for n in 2..=n_max {
        let sum: ExactRational = (1..n)
            .map(|k| {
                &c[k - 1] * &c[n - k - 1] / integer(((k + 1) * (n - k + 1)) as i64)
            })
            .sum();
        c.push(sum * rational((n * (n + 1)) as i64, (n - 1) as i64));
    }
    Ok(c)
}

/// `b_1 = 1/2`, `b_n = n/(n-1) * sum_{k<n} b_k b_{n-k}`.
pub fn b_sequence(n_max: usize) -> Result<Vec<ExactRational>> {
    require_n_max(n_max)?;
    let mut b: Vec<ExactRational> = vec![rational(1, 2)];
    for n in 2..=n_max {
        let sum: ExactRational = (1..n).map(|k| &b[k - 1] * &b[n - k - 1]).sum();
        b.push(sum * rational(n as i64, (n - 1) as i64));
    }
    Ok(b)
}

/// Taylor coefficients `1..=n_max` of `h = q^{-1}/2` with `q(x) = x e^{-x}`,
/// obtained by formal series reversion of `q`. Independent of the
/// convolution recursions.
pub fn h_series_coefficients(n_max: usize) -> Result<Vec<ExactRational>> {
    require_n_max(n_max)?;
    let exp_neg = PowerSeries::exp_scaled(&integer(-1), n_max - 1);
    let mut q = vec![ExactRational::zero()];
    q.extend(exp_neg.coeffs().iter().cloned());
    let inverse = PowerSeries::new(q).lagrange_inverse()?;
    let half = rational(1, 2);
    Ok(inverse.coeffs()[1..].iter().map(|c| c * &half).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VRoute {
    /// `v_n = 2^n c_n / (n! (n+1)!)`.
    FromC,
    /// `v_n = sum_k ((n-k)! k!)^2 v_k v_{n-k} / ((n-1)(n-1)! n!)`.
    DirectRecursion,
}

/// Volumes `v_n = lambda_{n-1}(P_n)` with the convention `v_1 = 1`.
pub fn v_sequence(n_max: usize, route: VRoute) -> Result<Vec<ExactRational>> {
    require_n_max(n_max)?;
    match route {
        VRoute::FromC => {
            let c = c_sequence(n_max)?;
            Ok(c.iter()
                .enumerate()
                .map(|(i, ci)| {
                    let n = i + 1;
                    let two_pow = ExactRational::from_integer(BigInt::from(2u32).pow(n as u32));
                    two_pow * ci / (fact(n) * fact(n + 1))
                })
                .collect())
        }
        VRoute::DirectRecursion => {
            let mut v: Vec<ExactRational> = vec![integer(1)];
            for n in 2..=n_max {
                let sum: ExactRational = (1..n)
                    .map(|k| {
                        let w = fact(n - k) * fact(k);
                        &w * &w * &v[k - 1] * &v[n - k - 1]
                    })
                    .sum();
                v.push(sum / (integer((n - 1) as i64) * fact(n - 1) * fact(n)));
            }
            Ok(v)
        }
    }
}

/// `P{argmin_{i <= k+1} Y_i = k} = c_k (k-1)! / (k+1)^k`.
pub fn argmin_last_but_one_probability(k: usize, c_k: &ExactRational) -> ExactRational {
    let denom = BigInt::from(k + 1).pow(k as u32);
    c_k * fact(k - 1) / ExactRational::from_integer(denom)
}

/// Partial sum `sum_{j <= terms} 1/j!`, a certified lower bound for `e`.
pub fn e_lower_bound(terms: usize) -> ExactRational {
    (0..=terms).map(|j| fact(j).recip()).sum()
}

/// Certifies `c_k <= sqrt(k) e^k` exactly: compares `c_k^2` against
/// `k * e_low^{2k}` where `e_low < e`, so a `true` cannot come from rounding.
pub fn c_within_growth_bound(k: usize, c_k: &ExactRational, e_low: &ExactRational) -> bool {
    let rhs = integer(k as i64) * Pow::pow(e_low, 2 * k as u32);
    c_k * c_k <= rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_base_and_small_values() {
        assert_eq!(c_sequence(1).unwrap(), vec![integer(1)]);
        let c = c_sequence(4).unwrap();
        assert_eq!(c, vec![integer(1), rational(3, 2), integer(3), rational(20, 3)]);
    }

    #[test]
    fn zero_n_max_is_invalid() {
        assert!(matches!(c_sequence(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(b_sequence(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(h_series_coefficients(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(v_sequence(0, VRoute::FromC), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn b_small_values() {
        assert_eq!(b_sequence(3).unwrap(), vec![rational(1, 2), rational(1, 2), rational(3, 4)]);
    }

    #[test]
    fn h_small_values() {
        assert_eq!(
            h_series_coefficients(3).unwrap(),
            vec![rational(1, 2), rational(1, 2), rational(3, 4)]
        );
        assert_eq!(h_series_coefficients(1).unwrap(), vec![rational(1, 2)]);
    }

    #[test]
    fn v_small_values_both_routes() {
        let want = vec![integer(1), rational(1, 2), rational(1, 6), rational(1, 27)];
        assert_eq!(v_sequence(4, VRoute::FromC).unwrap(), want);
        assert_eq!(v_sequence(4, VRoute::DirectRecursion).unwrap(), want);
    }

    #[test]
    fn argmin_probability_small_k() {
        let c = c_sequence(3).unwrap();
        assert_eq!(argmin_last_but_one_probability(1, &c[0]), rational(1, 2));
        assert_eq!(argmin_last_but_one_probability(2, &c[1]), rational(1, 6));
        assert_eq!(argmin_last_but_one_probability(3, &c[2]), rational(3, 32));
    }

    #[test]
    fn e_lower_bound_is_below_e() {
        let e = e_lower_bound(20);
        assert!(e < rational(2_718_281_828_459_046, 1_000_000_000_000_000));
        assert!(e > rational(2_718_281_828_459_044, 1_000_000_000_000_000));
    }

    #[test]
    fn growth_bound_rejects_oversized_value() {
        let e = e_lower_bound(30);
        assert!(c_within_growth_bound(1, &integer(1), &e));
        // sqrt(2) e^2 ~ 10.45
        assert!(c_within_growth_bound(2, &integer(10), &e));
        assert!(!c_within_growth_bound(2, &integer(11), &e));
    }
}
