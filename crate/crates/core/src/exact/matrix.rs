use std::fmt;

use num_traits::{One, Zero};

use super::{factorial, integer, triangular, ExactRational};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ExactRational::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<ExactRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, got: bad.len() });
        }
        let n = rows.len();
        Ok(Self { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ExactRational::one() } else { ExactRational::zero() })
    }

    pub fn diagonal(diag: Vec<ExactRational>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactRational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[ExactRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[ExactRational]) -> Result<Vec<ExactRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(ExactRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn row_sums(&self) -> Vec<ExactRational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<ExactRational> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Result<ExactRational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut m = self.entries.clone();
        let mut det = ExactRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return Ok(ExactRational::zero());
            };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let factor = &m[r * n + col] / &p;
                for j in col..n {
                    let delta = &factor * &m[col * n + j];
                    m[r * n + j] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Submatrix obtained by deleting the listed rows and columns (0-based).
    /// The result borrows `self`; no entries are copied until
    /// [`Minor::to_matrix`] is called.
    pub fn minor(&self, deleted_rows: &[usize], deleted_cols: &[usize]) -> Minor<'_> {
        Minor {
            base: self,
            rows: (0..self.rows).filter(|i| !deleted_rows.contains(i)).collect(),
            cols: (0..self.cols).filter(|j| !deleted_cols.contains(j)).collect(),
        }
    }

    /// First entry where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|p| (p / self.cols, p % self.cols))
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Index-deletion view into an [`ExactMatrix`].
#[derive(Clone, Debug)]
pub struct Minor<'a> {
    base: &'a ExactMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Minor<'_> {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactRational {
        self.base.get(self.rows[i], self.cols[j])
    }

    pub fn to_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).clone())
    }
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("matrix order must be at least 1"));
    }
    Ok(())
}

/// `A_n`: maps increments `X` to normalized areas `Y = A X`. Row `k`
/// (1-based) has entries `2(k-j+1)/(k(k+1))` for `j <= k`.
pub fn build_a(n: usize) -> Result<ExactMatrix> {
    require_positive(n)?;
    Ok(ExactMatrix::from_fn(n, n, |i, j| {
        if j > i {
            return ExactRational::zero();
        }
        let (k, j) = ((i + 1) as i64, (j + 1) as i64);
        super::rational(2 * (k - j + 1), k * (k + 1))
    }))
}

/// `L_n = A_n^{-1}`: three nonzero diagonals `l_{k-2}, -2 l_{k-1}, l_k` in
/// row `k`.
pub fn build_l(n: usize) -> Result<ExactMatrix> {
    require_positive(n)?;
    Ok(ExactMatrix::from_fn(n, n, |i, j| {
        let k = i + 1;
        match i.checked_sub(j) {
            Some(0) => triangular(k),
            Some(1) => integer(-2) * triangular(k - 1),
            Some(2) => triangular(k - 2),
            _ => ExactRational::zero(),
        }
    }))
}

/// Diagonal `m x m` matrix with entries `l_{i+r} / l_{s+r}`, `r = 0..m`.
pub fn j_matrix(m: usize, s: usize, i: usize) -> Result<ExactMatrix> {
    if s == 0 || i == 0 {
        return Err(Error::invalid("J indices s and i must be at least 1"));
    }
    Ok(ExactMatrix::diagonal((0..m).map(|r| triangular(i + r) / triangular(s + r)).collect()))
}

/// Factorial closed form of `det J_m^{s->i}`.
pub fn j_determinant_formula(m: usize, s: usize, i: usize) -> ExactRational {
    let f = |k| ExactRational::from_integer(factorial(k));
    (f(s - 1) * f(s) * f(i + m - 1) * f(i + m)) / (f(i - 1) * f(i) * f(s + m - 1) * f(s + m))
}

/// Upper triangular matrix of ones.
pub fn upper_ones(k: usize) -> ExactMatrix {
    ExactMatrix::from_fn(k, k, |i, j| if j >= i { ExactRational::one() } else { ExactRational::zero() })
}

/// Lower triangular matrix of ones.
pub fn lower_ones(k: usize) -> ExactMatrix {
    upper_ones(k).transpose()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryMismatch {
    pub identity: &'static str,
    pub row: usize,
    pub col: usize,
    pub expected: ExactRational,
    pub got: ExactRational,
}

impl fmt::Display for EntryMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: entry ({}, {}) is {}, expected {}",
            self.identity, self.row, self.col, self.got, self.expected
        )
    }
}

#[derive(Clone, Debug)]
pub struct InverseReport {
    pub n: usize,
    pub identities_checked: Vec<&'static str>,
    pub entries_checked: usize,
    pub first_failure: Option<EntryMismatch>,
}

impl InverseReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Expected value of `I^up I^down L_n^{1;n}`: first column
/// `(-n, -n+2, ..., -2, -1)` and diagonal `-l_r` from the second row on.
fn triangular_product_reference(n: usize) -> ExactMatrix {
    let m = n - 1;
    ExactMatrix::from_fn(m, m, |i, j| {
        let r = i + 1;
        if j == 0 {
            if r == 1 {
                integer(-(n as i64))
            } else {
                integer(r as i64 - n as i64)
            }
        } else if i == j {
            -triangular(r)
        } else {
            ExactRational::zero()
        }
    })
}

fn compare(identity: &'static str, got: &ExactMatrix, want: &ExactMatrix) -> Option<EntryMismatch> {
    let (row, col) = got.first_difference(want)?;
    let entry = |m: &ExactMatrix| {
        if row < m.rows() && col < m.cols() { m.get(row, col).clone() } else { ExactRational::zero() }
    };
    Some(EntryMismatch { identity, row, col, expected: entry(want), got: entry(got) })
}

/// Checks `L A = A L = I` and, for `n >= 2`, the triangular reduction of the
/// minor `L_n^{1;n}`.
pub fn verify_inverse(n: usize) -> Result<InverseReport> {
    let a = build_a(n)?;
    let l = build_l(n)?;
    let id = ExactMatrix::identity(n);
    let mut identities = vec!["L*A = I", "A*L = I"];
    let mut failure = compare("L*A = I", &l.mul(&a)?, &id).or(compare("A*L = I", &a.mul(&l)?, &id));
    let mut entries = 2 * n * n;
    if n >= 2 {
        identities.push("upper*lower*L^{1;n} reduction");
        let minor = l.minor(&[0], &[n - 1]).to_matrix();
        let reduced = upper_ones(n - 1).mul(&lower_ones(n - 1))?.mul(&minor)?;
        entries += (n - 1) * (n - 1);
        failure = failure.or(compare(
            "upper*lower*L^{1;n} reduction",
            &reduced,
            &triangular_product_reference(n),
        ));
    }
    Ok(InverseReport { n, identities_checked: identities, entries_checked: entries, first_failure: failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    #[test]
    fn order_one_is_identity() {
        assert_eq!(build_a(1).unwrap(), ExactMatrix::identity(1));
        assert_eq!(build_l(1).unwrap(), ExactMatrix::identity(1));
        assert!(verify_inverse(1).unwrap().passed());
    }

    #[test]
    fn zero_order_rejected() {
        assert!(matches!(build_a(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_l(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn third_rows_match_displayed_matrices() {
        let a = build_a(3).unwrap();
        assert_eq!(a.row(2), &[rational(3, 6), rational(2, 6), rational(1, 6)]);
        let l = build_l(3).unwrap();
        assert_eq!(l.row(2), &[integer(1), integer(-6), integer(6)]);
        let l4 = build_l(4).unwrap();
        assert_eq!(l4.row(3), &[integer(0), integer(3), integer(-12), integer(10)]);
    }

    #[test]
    fn inverse_n5_all_entries() {
        let report = verify_inverse(5).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure);
        let product = build_l(5).unwrap().mul(&build_a(5).unwrap()).unwrap();
        assert_eq!(product, ExactMatrix::identity(5));
    }

    #[test]
    fn mismatch_is_reported() {
        let l = build_l(3).unwrap();
        let mut bad = build_a(3).unwrap();
        bad.entries[4] = integer(7);
        let failure = compare("L*A = I", &l.mul(&bad).unwrap(), &ExactMatrix::identity(3)).unwrap();
        assert_eq!((failure.row, failure.col), (1, 1));
    }

    #[test]
    fn minor_view_deletes_indices() {
        let l = build_l(4).unwrap();
        let m = l.minor(&[0], &[3]);
        assert_eq!((m.rows(), m.cols()), (3, 3));
        assert_eq!(m.get(0, 0), &integer(-2));
        assert_eq!(m.get(2, 2), &integer(-12));
    }

    #[test]
    fn determinant_of_a_and_l() {
        // det A_n = prod 1/l_k, det L_n = prod l_k.
        let det_l = build_l(6).unwrap().determinant().unwrap();
        let expected: ExactRational = (1..=6).map(triangular).product();
        assert_eq!(det_l, expected);
        assert_eq!(build_a(6).unwrap().determinant().unwrap(), expected.recip());
    }

    #[test]
    fn j_matrix_entries() {
        let j = j_matrix(3, 2, 1).unwrap();
        assert_eq!(j.get(0, 0), &rational(1, 3));
        assert_eq!(j.get(2, 2), &rational(6, 10));
    }
}
