use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled function `t -> value` with strictly increasing `t` and finite
/// values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    points: Vec<CurvePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Curve {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(t, v)) in points.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::domain(format!("non-finite curve point ({t}, {v}) at index {i}")));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(Error::invalid(format!("curve abscissae not strictly increasing at index {i}")));
            }
        }
        Ok(Self {
            label: label.into(),
            points: points.into_iter().map(|(t, value)| CurvePoint { t, value }).collect(),
        })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<CurvePoint> {
        self.points.first().copied()
    }

    pub fn last(&self) -> Option<CurvePoint> {
        self.points.last().copied()
    }

    /// `max |value - reference(t)|` over the samples.
    pub fn max_abs_deviation(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|p| (p.value - reference(p.t)).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for p in &self.points {
            w.write_record([format_f64(p.t), format_f64(p.value)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("curve serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: Curve = serde_json::from_value(value.clone())?;
        Curve::new(raw.label, raw.points.into_iter().map(|p| (p.t, p.value)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_and_non_finite() {
        assert!(Curve::new("x", vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Curve::new("x", vec![(0.0, f64::NAN)]).is_err());
        assert!(Curve::new("x", vec![]).unwrap().is_empty());
    }

    #[test]
    fn csv_uses_17_significant_digits() {
        let c = Curve::new("g", vec![(0.0, 1.0), (0.5, 0.1)]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines[2], "5.0000000000000000e-1,1.0000000000000001e-1");
        let parsed: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, 0.1);
    }

    #[test]
    fn json_roundtrip() {
        let c = Curve::new("g", vec![(0.0, 1.0), (0.25, 0.7)]).unwrap();
        assert_eq!(Curve::from_json(&c.to_json()).unwrap(), c);
    }
}
