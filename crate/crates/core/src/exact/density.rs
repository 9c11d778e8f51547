use num_traits::Signed;

use super::{build_l, factorial, to_f64, triangular, ExactRational};
use crate::error::{Error, Result};

/// Joint density of `(Y_1, ..., Y_n)`:
/// `n!(n+1)!/2^n * exp(-l_n y_n + l_{n-1} y_{n-1})` on the cone `L y >= 0`,
/// zero elsewhere. For `n = 1` this is the standard exponential density.
///
/// The support test applies the exact `L_n` to the exact rational values of
/// the input doubles, so points on the boundary are classified exactly.
pub fn density_eval(y: &[f64]) -> Result<f64> {
    let n = y.len();
    if n == 0 {
        return Err(Error::invalid("density needs at least one coordinate"));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite coordinate {bad}")));
    }
    let exact: Vec<ExactRational> = y
        .iter()
        .map(|&v| ExactRational::from_float(v).expect("finite doubles are rational"))
        .collect();
    let x = build_l(n)?.mul_vec(&exact)?;
    if x.iter().any(Signed::is_negative) {
        return Ok(0.0);
    }
    let norm = ExactRational::from_integer(factorial(n) * factorial(n + 1))
        / ExactRational::from_integer(num_bigint::BigInt::from(2u8).pow(n as u32));
    let mut exponent = -to_f64(&triangular(n)) * y[n - 1];
    if n >= 2 {
        exponent += to_f64(&triangular(n - 1)) * y[n - 2];
    }
    Ok(to_f64(&norm) * exponent.exp())
}
