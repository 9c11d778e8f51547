use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::{build_l, factorial, integer, rational, to_f64, ExactMatrix, ExactRational};
use crate::error::{Error, Result};
use crate::montecarlo::{uniform_open, MCEstimate, McConfig};

/// Largest `n` accepted by [`polytope_volume_mc`]; beyond it the acceptance
/// rate in the bounding box becomes too small to be useful.
pub const MAX_MC_POLYTOPE_N: usize = 6;

/// `P_n = {y in R^(n-1) : L_n^{1;n} y >= -1, y >= 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeSpec {
    pub n: usize,
    /// `L_n` with its first row and last column deleted.
    pub constraints: ExactMatrix,
    /// Right-hand side, all `-1`.
    pub rhs: Vec<ExactRational>,
}

impl PolytopeSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("polytope P_n needs n >= 2, got {n}")));
        }
        let l = build_l(n)?;
        Ok(Self {
            n,
            constraints: l.minor(&[0], &[n - 1]).to_matrix(),
            rhs: vec![integer(-1); n - 1],
        })
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// Exact membership: all `2(n-1)` half-space constraints.
    pub fn contains(&self, point: &[ExactRational]) -> Result<bool> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: point.len() });
        }
        if point.iter().any(Signed::is_negative) {
            return Ok(false);
        }
        let lhs = self.constraints.mul_vec(point)?;
        Ok(lhs.iter().zip(&self.rhs).all(|(a, b)| a >= b))
    }

    /// Half-spaces as `(a, b)` meaning `a . y >= b`: the matrix rows first,
    /// then the coordinate constraints.
    fn half_spaces(&self) -> Vec<(Vec<ExactRational>, ExactRational)> {
        let d = self.dim();
        let mut out: Vec<_> = (0..d)
            .map(|i| (self.constraints.row(i).to_vec(), self.rhs[i].clone()))
            .collect();
        for j in 0..d {
            let mut e = vec![ExactRational::zero(); d];
            e[j] = integer(1);
            out.push((e, ExactRational::zero()));
        }
        out
    }
}

/// The apex `y*` with coordinates `(n-i)/(i+1)`; verified to solve
/// `L_n^{1;n} y* = -1` exactly.
pub fn polytope_vertex(n: usize) -> Result<Vec<ExactRational>> {
    let spec = PolytopeSpec::new(n)?;
    let y: Vec<_> = (1..n).map(|i| rational((n - i) as i64, (i + 1) as i64)).collect();
    if spec.constraints.mul_vec(&y)? != spec.rhs {
        return Err(Error::Numeric(format!("y* does not solve L_{n}^{{1;n}} y = -1")));
    }
    Ok(y)
}

pub fn polytope_contains(n: usize, point: &[ExactRational]) -> Result<bool> {
    PolytopeSpec::new(n)?.contains(point)
}

/// Rejection-sampling estimate of `v_n = vol(P_n)` inside the box
/// `[0, y*]`, which contains `P_n`.
pub fn polytope_volume_mc(n: usize, cfg: &McConfig) -> Result<MCEstimate> {
    if !(2..=MAX_MC_POLYTOPE_N).contains(&n) {
        return Err(Error::invalid(format!(
            "Monte Carlo volume supports n in 2..={MAX_MC_POLYTOPE_N}, got {n}"
        )));
    }
    cfg.validate()?;
    let spec = PolytopeSpec::new(n)?;
    let d = spec.dim();
    let apex: Vec<f64> = polytope_vertex(n)?.iter().map(to_f64).collect();
    let rows: Vec<Vec<f64>> = (0..d).map(|i| spec.constraints.row(i).iter().map(to_f64).collect()).collect();
    let box_volume: f64 = apex.iter().product();
    let hits: u64 = crate::montecarlo::parallel_tally(cfg, |rng, hits: &mut u64| {
        let mut y = [0.0f64; MAX_MC_POLYTOPE_N];
        for (yj, hi) in y.iter_mut().zip(&apex) {
            *yj = hi * uniform_open(rng);
        }
        let inside = rows
            .iter()
            .all(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() >= -1.0);
        if inside {
            *hits += 1;
        }
    });
    Ok(MCEstimate::from_bernoulli("polytope_volume", &[("n", n as f64)], hits, cfg.samples, cfg.seed)
        .scaled(box_volume))
}

fn solve2(a: &[ExactRational], b: &[ExactRational], ra: &ExactRational, rb: &ExactRational) -> Option<[ExactRational; 2]> {
    let det = &a[0] * &b[1] - &a[1] * &b[0];
    if det.is_zero() {
        return None;
    }
    let x = (ra * &b[1] - &a[1] * rb) / &det;
    let y = (&a[0] * rb - ra * &b[0]) / &det;
    Some([x, y])
}

/// Exact volume by vertex enumeration: interval length for `n = 2`,
/// shoelace area of the enumerated polygon for `n = 3`.
pub fn polytope_volume_exact(n: usize) -> Result<ExactRational> {
    let spec = PolytopeSpec::new(n)?;
    let hs = spec.half_spaces();
    match n {
        2 => {
            // One coordinate: a y >= b gives y >= b/a or y <= b/a.
            let mut lo: Option<ExactRational> = None;
            let mut hi: Option<ExactRational> = None;
            for (a, b) in &hs {
                let bound = b / &a[0];
                if a[0].is_positive() {
                    lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
                } else if a[0].is_negative() {
                    hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
                }
            }
            match (lo, hi) {
                (Some(lo), Some(hi)) if hi >= lo => Ok(hi - lo),
                _ => Err(Error::Numeric("P_2 is not a bounded interval".into())),
            }
        }
        3 => {
            let mut vertices: Vec<[ExactRational; 2]> = Vec::new();
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    let Some(p) = solve2(&hs[i].0, &hs[j].0, &hs[i].1, &hs[j].1) else { continue };
                    if spec.contains(&p)? && !vertices.contains(&p) {
                        vertices.push(p);
                    }
                }
            }
            Ok(shoelace(order_convex(vertices)))
        }
        _ => Err(Error::Unsupported(format!(
            "exact geometric volume is implemented for n = 2, 3 only (got {n})"
        ))),
    }
}

/// Sorts the vertices of a convex polygon counter-clockwise around their
/// centroid, exactly.
fn order_convex(mut pts: Vec<[ExactRational; 2]>) -> Vec<[ExactRational; 2]> {
    if pts.len() < 3 {
        return pts;
    }
    let k = integer(pts.len() as i64);
    let cx = pts.iter().map(|p| p[0].clone()).sum::<ExactRational>() / &k;
    let cy = pts.iter().map(|p| p[1].clone()).sum::<ExactRational>() / &k;
    // Upper half-plane (angle in [0, pi)) before lower, then by cross product.
    let half = |p: &[ExactRational; 2]| {
        let (dx, dy) = (&p[0] - &cx, &p[1] - &cy);
        !(dy.is_positive() || (dy.is_zero() && dx.is_positive()))
    };
    pts.sort_by(|p, q| {
        half(p).cmp(&half(q)).then_with(|| {
            let cross = (&p[0] - &cx) * (&q[1] - &cy) - (&p[1] - &cy) * (&q[0] - &cx);
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    pts
}

fn shoelace(pts: Vec<[ExactRational; 2]>) -> ExactRational {
    let m = pts.len();
    let twice: ExactRational = (0..m)
        .map(|i| {
            let (p, q) = (&pts[i], &pts[(i + 1) % m]);
            &p[0] * &q[1] - &q[0] * &p[1]
        })
        .sum();
    twice.abs() / integer(2)
}

/// `vol(F_n^(k)) = k!(k+1)!(n-k-1)!(n-k)! / ((n-1)! n!) * v_k v_{n-k}` for the
/// face `P_n ∩ {y_k = 0}`; `v` is 0-indexed (`v[0] = v_1`).
pub fn face_volume(n: usize, k: usize, v: &[ExactRational]) -> ExactRational {
    let f = |m| ExactRational::from_integer(factorial(m));
    f(k) * f(k + 1) * f(n - k - 1) * f(n - k) / (f(n - 1) * f(n)) * &v[k - 1] * &v[n - k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_small_n() {
        assert_eq!(polytope_vertex(2).unwrap(), vec![rational(1, 2)]);
        assert_eq!(polytope_vertex(3).unwrap(), vec![integer(1), rational(1, 3)]);
        assert_eq!(
            polytope_vertex(5).unwrap(),
            vec![integer(2), integer(1), rational(1, 2), rational(1, 5)]
        );
        assert!(polytope_vertex(1).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(polytope_contains(3, &[integer(0), integer(0)]).unwrap());
        assert!(polytope_contains(3, &[integer(1), rational(1, 3)]).unwrap());
        assert!(!polytope_contains(3, &[integer(2), integer(0)]).unwrap());
        assert!(!polytope_contains(3, &[rational(-1, 10), integer(0)]).unwrap());
        assert!(matches!(
            polytope_contains(3, &[integer(0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn exact_volumes() {
        assert_eq!(polytope_volume_exact(2).unwrap(), rational(1, 2));
        assert_eq!(polytope_volume_exact(3).unwrap(), rational(1, 6));
        assert!(matches!(polytope_volume_exact(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn n3_polygon_vertices() {
        let spec = PolytopeSpec::new(3).unwrap();
        let hs = spec.half_spaces();
        let mut verts = Vec::new();
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                if let Some(p) = solve2(&hs[i].0, &hs[j].0, &hs[i].1, &hs[j].1) {
                    if spec.contains(&p).unwrap() && !verts.contains(&p) {
                        verts.push(p);
                    }
                }
            }
        }
        let want = [
            [integer(0), integer(0)],
            [rational(1, 2), integer(0)],
            [integer(1), rational(1, 3)],
            [integer(0), rational(1, 6)],
        ];
        assert_eq!(verts.len(), 4);
        assert!(want.iter().all(|w| verts.contains(w)));
    }

    #[test]
    fn mc_range_checked() {
        let c = McConfig::new(10, 0);
        assert!(polytope_volume_mc(1, &c).is_err());
        assert!(polytope_volume_mc(7, &c).is_err());
    }

    #[test]
    fn face_volumes_n3() {
        let v = [integer(1), rational(1, 2)];
        assert_eq!(face_volume(3, 1, &v), rational(1, 6));
        assert_eq!(face_volume(3, 2, &v), rational(1, 2));
    }
}
