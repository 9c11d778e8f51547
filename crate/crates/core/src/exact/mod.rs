//! Exact rational computations: the constant sequences `c_n`, `b_n`, `v_n`,
//! the area matrices `A_n` and their inverses `L_n`, and the polytope `P_n`
//! whose volume ties the two together.
//!
//! Everything here is computed with arbitrary-precision rationals; floats
//! only appear at the boundary (density evaluation, Monte Carlo volume).

mod density;
mod matrix;
mod polytope;
mod sequences;
mod series;
mod table;

pub use density::density_eval;
pub use matrix::{
    build_a, build_l, j_matrix, j_determinant_formula, lower_ones, upper_ones, verify_inverse,
    EntryMismatch, ExactMatrix, InverseReport, Minor,
};
pub use polytope::{
    face_volume, polytope_contains, polytope_vertex, polytope_volume_exact,
    polytope_volume_mc, PolytopeSpec, MAX_MC_POLYTOPE_N,
};
pub use sequences::{
    argmin_last_but_one_probability, b_sequence, c_sequence, c_within_growth_bound,
    e_lower_bound, h_series_coefficients, v_sequence, VRoute,
};
pub use series::PowerSeries;
pub use table::{ConstantTable, CrossCheck, SequenceMethod};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type ExactRational = BigRational;

pub fn rational(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(value))
}

/// `l_k = k(k+1)/2`, with `l_0 = 0`.
pub fn triangular(k: usize) -> ExactRational {
    let k = k as i64;
    integer(k * (k + 1) / 2)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Nearest double to an exact rational.
pub fn to_f64(value: &ExactRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational as `num/den`, or just `num` for integers.
pub fn format_rational(value: &ExactRational) -> String {
    value.to_string()
}

pub fn parse_rational(text: &str) -> Option<ExactRational> {
    text.trim().parse().ok()
}
