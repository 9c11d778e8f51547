use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    b_sequence, c_sequence, format_rational, h_series_coefficients, integer, parse_rational,
    rational, v_sequence, ExactRational, VRoute,
};
use crate::error::{Error, Result};

/// Which computation produced a stored sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceMethod {
    Recursion,
    FromC,
    LagrangeInversion,
}

/// `c_n`, `b_n` and `v_n` for `n = 1..=n_max`, each tagged with its
/// producing method. Vectors are 0-indexed (`c[0]` is `c_1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantTable {
    pub n_max: usize,
    pub c: Vec<ExactRational>,
    pub b: Vec<ExactRational>,
    pub v: Vec<ExactRational>,
    pub c_method: SequenceMethod,
    pub b_method: SequenceMethod,
    pub v_method: SequenceMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: &'static str,
    pub agree: bool,
    /// First `n` (1-based) at which the routes disagree.
    pub first_mismatch: Option<usize>,
}

fn first_mismatch(a: &[ExactRational], b: &[ExactRational]) -> Option<usize> {
    if a.len() != b.len() {
        return Some(a.len().min(b.len()) + 1);
    }
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| i + 1)
}

#[derive(Serialize, Deserialize)]
struct Methods {
    c: SequenceMethod,
    b: SequenceMethod,
    v: SequenceMethod,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    n: usize,
    c: String,
    b: String,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    n_max: usize,
    methods: Methods,
    rows: Vec<JsonRow>,
}

impl ConstantTable {
    /// Each sequence from its own recursion.
    pub fn compute(n_max: usize) -> Result<Self> {
        Ok(Self {
            n_max,
            c: c_sequence(n_max)?,
            b: b_sequence(n_max)?,
            v: v_sequence(n_max, VRoute::DirectRecursion)?,
            c_method: SequenceMethod::Recursion,
            b_method: SequenceMethod::Recursion,
            v_method: SequenceMethod::Recursion,
        })
    }

    /// Compares the stored sequences against every alternative route.
    pub fn cross_check(&self) -> Result<Vec<CrossCheck>> {
        let n = self.n_max;
        let b_from_c: Vec<_> =
            self.c.iter().enumerate().map(|(i, c)| c / integer(i as i64 + 2)).collect();
        let mut checks = vec![
            (
                "base values c_1 = 1, b_1 = 1/2, v_1 = 1",
                if self.c.first() == Some(&integer(1))
                    && self.b.first() == Some(&rational(1, 2))
                    && self.v.first() == Some(&integer(1))
                {
                    None
                } else {
                    Some(1)
                },
            ),
            ("b_n = c_n/(n+1)", first_mismatch(&self.b, &b_from_c)),
            ("b_n = [x^n] q^{-1}(x)/2", first_mismatch(&self.b, &h_series_coefficients(n)?)),
            ("v_n = 2^n c_n/(n!(n+1)!)", first_mismatch(&self.v, &v_sequence(n, VRoute::FromC)?)),
        ];
        if self.c_method != SequenceMethod::Recursion {
            checks.push(("c_n by recursion", first_mismatch(&self.c, &c_sequence(n)?)));
        }
        Ok(checks
            .into_iter()
            .map(|(name, first)| CrossCheck { name, agree: first.is_none(), first_mismatch: first })
            .collect())
    }

    /// Perturbs `b_n` so that the cross checks must fail; used to exercise
    /// failure paths.
    pub fn inject_disagreement(&mut self, n: usize) {
        if let Some(b) = self.b.get_mut(n.saturating_sub(1)) {
            *b += rational(1, 1_000_003);
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "c_num", "c_den", "b_num", "b_den", "v_num", "v_den"])?;
        for i in 0..self.n_max {
            let (c, b, v) = (&self.c[i], &self.b[i], &self.v[i]);
            w.write_record([
                (i + 1).to_string(),
                c.numer().to_string(),
                c.denom().to_string(),
                b.numer().to_string(),
                b.denom().to_string(),
                v.numer().to_string(),
                v.denom().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let table = JsonTable {
            n_max: self.n_max,
            methods: Methods { c: self.c_method, b: self.b_method, v: self.v_method },
            rows: (0..self.n_max)
                .map(|i| JsonRow {
                    n: i + 1,
                    c: format_rational(&self.c[i]),
                    b: format_rational(&self.b[i]),
                    v: format_rational(&self.v[i]),
                })
                .collect(),
        };
        serde_json::to_value(table).expect("table serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let table: JsonTable = serde_json::from_value(value.clone())?;
        let parse = |s: &str| {
            parse_rational(s).ok_or_else(|| Error::invalid(format!("not a rational: {s:?}")))
        };
        let mut out = Self {
            n_max: table.n_max,
            c: Vec::new(),
            b: Vec::new(),
            v: Vec::new(),
            c_method: table.methods.c,
            b_method: table.methods.b,
            v_method: table.methods.v,
        };
        for row in &table.rows {
            out.c.push(parse(&row.c)?);
            out.b.push(parse(&row.b)?);
            out.v.push(parse(&row.v)?);
        }
        if out.c.len() != out.n_max {
            return Err(Error::DimensionMismatch { expected: out.n_max, got: out.c.len() });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table_agrees() {
        let t = ConstantTable::compute(6).unwrap();
        for check in t.cross_check().unwrap() {
            assert!(check.agree, "{}", check.name);
        }
    }

    #[test]
    fn injected_disagreement_detected() {
        let mut t = ConstantTable::compute(5).unwrap();
        t.inject_disagreement(3);
        let checks = t.cross_check().unwrap();
        let bad: Vec<_> = checks.iter().filter(|c| !c.agree).collect();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|c| c.first_mismatch == Some(3)));
    }

    #[test]
    fn csv_layout() {
        let t = ConstantTable::compute(4).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,c_num,c_den,b_num,b_den,v_num,v_den");
        assert_eq!(lines[4], "4,20,3,4,3,1,27");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_roundtrip() {
        let t = ConstantTable::compute(7).unwrap();
        let json = t.to_json();
        assert_eq!(json["rows"][3]["c"], "20/3");
        assert_eq!(json["methods"]["v"], "recursion");
        assert_eq!(ConstantTable::from_json(&json).unwrap(), t);
    }
}
