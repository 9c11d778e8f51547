use crate::error::{Error, Result};

/// Parses `a:b:step` (inclusive of both ends) or a comma-separated list.
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad number {s:?} in t grid {spec:?}")))
    };
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(Error::invalid(format!("range grid must be a:b:step, got {spec:?}")));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("range grid {spec:?} needs a <= b and step > 0")));
        }
        let count = ((b - a) / step).round();
        if (a + count * step - b).abs() > 1e-9 * b.abs().max(1.0) {
            return Err(Error::invalid(format!("step does not divide the range in {spec:?}")));
        }
        let count = count as usize;
        // Multiply rather than accumulate; pin the endpoint.
        (0..=count).map(|i| if i == count { b } else { a + i as f64 * step }).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("t grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!("t grid {spec:?} is not strictly increasing")));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let g = parse_t_grid("0:1:0.01").unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!((g[0], g[100]), (0.0, 1.0));
        assert_eq!(g[30], 0.3);
        assert_eq!(parse_t_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_t_grid("0.1, 0.2,0.9").unwrap(), vec![0.1, 0.2, 0.9]);
        assert_eq!(parse_t_grid("0.25").unwrap(), vec![0.25]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "0:1", "0:1:0", "1:0:0.1", "0:1:0.3", "0.2,0.1", "a,b", "0,nan"] {
            assert!(parse_t_grid(bad).is_err(), "{bad}");
        }
    }
}
