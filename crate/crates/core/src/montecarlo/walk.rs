use rand::Rng;

use super::exponential;

/// One realization of the walk: partial sums `S_1..S_n` and normalized
/// areas `Y_k = 2/(k(k+1)) * (S_1 + ... + S_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    pub s: Vec<f64>,
    pub y: Vec<f64>,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// 1-based index of the smallest `Y_k`; ties go to the smaller index.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (k, y) in self.y.iter().enumerate().skip(1) {
            if *y < self.y[best] {
                best = k;
            }
        }
        best + 1
    }
}

/// Streaming generator of `Y_1, Y_2, ...` in O(1) per step.
#[derive(Clone, Debug, Default)]
pub struct AreaWalk {
    k: u64,
    s: f64,
    area: f64,
}

impl AreaWalk {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advances by one exponential increment and returns `(S_k, Y_k)`.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (f64, f64) {
        self.k += 1;
        self.s += exponential(rng);
        self.area += self.s;
        let k = self.k as f64;
        (self.s, 2.0 * self.area / (k * (k + 1.0)))
    }

    pub fn steps(&self) -> u64 {
        self.k
    }
}

pub fn sample_walk<R: Rng + ?Sized>(n: usize, rng: &mut R) -> WalkPath {
    let mut walk = AreaWalk::new();
    let (s, y) = (0..n).map(|_| walk.step(rng)).unzip();
    WalkPath { s, y }
}
