//! Event-driven simulation of `n` sticky particles of mass `1/n` on the
//! line. Every cluster accelerates by (mass to its right) minus (mass to its
//! left), so between collisions trajectories are exact quadratics and only
//! the collision times of adjacent pairs need to be tracked.

mod kcurve;

pub use kcurve::{k_curve, InitialModel, KCurve, KCurvePoint, KCurveRun};

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::curve::format_f64;
use crate::error::{Error, Result};
use crate::montecarlo::{exponential, uniform_open};

/// Events closer than this are treated as simultaneous and handled
/// left to right.
pub const SIMULTANEOUS: f64 = 1e-12;
/// Allowed disagreement between the two sides of a contact, and between
/// neighbours that must stay ordered.
pub const CONTACT_TOLERANCE: f64 = 1e-9;
/// Allowed drift of the center of mass.
pub const COM_TOLERANCE: f64 = 1e-9;

const NONE: usize = usize::MAX;

/// Snapshot of one cluster at the state's current time. The cluster holds
/// the initial particles `first .. first + members`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub first: usize,
    pub members: usize,
    pub mass: f64,
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

#[derive(Clone, Debug)]
struct Slot {
    first: usize,
    members: usize,
    // Trajectory x0 + v0 (t - t0) + accel (t - t0)^2 / 2.
    x0: f64,
    v0: f64,
    t0: f64,
    accel: f64,
    prev: usize,
    next: usize,
    version: u32,
    alive: bool,
}

impl Slot {
    fn at(&self, t: f64) -> (f64, f64) {
        let d = t - self.t0;
        (self.x0 + self.v0 * d + 0.5 * self.accel * d * d, self.v0 + self.accel * d)
    }
}

/// A scheduled contact of two adjacent clusters, valid only while both
/// clusters keep the recorded versions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    pub left: usize,
    pub right: usize,
    pub left_version: u32,
    pub right_version: u32,
    /// Index of the leftmost particle of the left cluster.
    pub left_first: usize,
}

impl Eq for CollisionEvent {}

impl Ord for CollisionEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.left_first.cmp(&other.left_first))
    }
}

impl PartialOrd for CollisionEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MergeRecord {
    pub time: f64,
    /// Leftmost particle of the left and right cluster.
    pub left_index: usize,
    pub right_index: usize,
    pub left_size: usize,
    pub right_size: usize,
    pub position: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    /// Sum of member counts; equals `n` when mass is conserved.
    pub mass_units: usize,
    pub com_drift: f64,
    pub ordered: bool,
    pub accelerations_ok: bool,
    pub merges: usize,
    pub clusters: usize,
    /// Merge times are non-decreasing (up to [`SIMULTANEOUS`]).
    pub k_monotone: bool,
    pub n: usize,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.mass_units == self.n
            && self.com_drift <= COM_TOLERANCE
            && self.ordered
            && self.accelerations_ok
            && self.k_monotone
            && self.merges + self.clusters == self.n
            && (self.clusters != 1 || self.merges == self.n - 1)
    }
}

/// Gap between adjacent clusters closes as
/// `dx + dv tau - (m_L + m_R) tau^2 / 2`; returns its positive root.
fn contact_delay(dx: f64, dv: f64, total_mass: f64) -> f64 {
    let dx = dx.max(0.0);
    let root = (dv * dv + 2.0 * total_mass * dx).sqrt();
    if dv > 0.0 {
        (dv + root) / total_mass
    } else if root - dv > 0.0 {
        // Rationalized to avoid cancellation when dv < 0.
        2.0 * dx / (root - dv)
    } else {
        0.0
    }
}

/// Time until `left` and `right`, snapshots at a common time, touch.
pub fn collision_time(left: &Cluster, right: &Cluster) -> Result<f64> {
    if left.first + left.members != right.first {
        return Err(Error::Contract(format!(
            "clusters starting at particles {} and {} are not adjacent",
            left.first, right.first
        )));
    }
    if !(left.position <= right.position) {
        return Err(Error::Contract(format!(
            "left cluster at {} lies right of {}",
            left.position, right.position
        )));
    }
    Ok(contact_delay(
        right.position - left.position,
        right.velocity - left.velocity,
        left.mass + right.mass,
    ))
}

/// Clusters in a doubly linked list over an arena, plus the pending
/// collision queue and the merge history.
#[derive(Clone, Debug)]
pub struct SystemState {
    n: usize,
    time: f64,
    slots: Vec<Slot>,
    head: usize,
    clusters: usize,
    queue: BinaryHeap<Reverse<CollisionEvent>>,
    merges: Vec<MergeRecord>,
    initial_com: f64,
}

impl SystemState {
    /// Immobile unit-count clusters at sorted `positions`.
    pub fn from_positions(positions: &[f64]) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("particle positions must be finite"));
        }
        if positions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("particle positions must be sorted"));
        }
        let slots = positions
            .iter()
            .enumerate()
            .map(|(i, &x)| Slot {
                first: i,
                members: 1,
                x0: x,
                v0: 0.0,
                t0: 0.0,
                accel: acceleration(n, i, 1),
                prev: if i == 0 { NONE } else { i - 1 },
                next: if i + 1 == n { NONE } else { i + 1 },
                version: 0,
                alive: true,
            })
            .collect();
        let mut state = Self {
            n,
            time: 0.0,
            slots,
            head: 0,
            clusters: n,
            queue: BinaryHeap::with_capacity(2 * n),
            merges: Vec::with_capacity(n - 1),
            initial_com: positions.iter().sum::<f64>() / n as f64,
        };
        for i in 0..n - 1 {
            state.schedule(i, i + 1);
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn merges(&self) -> &[MergeRecord] {
        &self.merges
    }

    fn iter_slots(&self) -> impl Iterator<Item = &Slot> {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            if cur == NONE {
                return None;
            }
            let s = &self.slots[cur];
            cur = s.next;
            Some(s)
        })
    }

    /// Left-to-right snapshot at the current time.
    pub fn clusters(&self) -> Vec<Cluster> {
        let n = self.n as f64;
        self.iter_slots()
            .map(|s| {
                let (position, velocity) = s.at(self.time);
                Cluster {
                    first: s.first,
                    members: s.members,
                    mass: s.members as f64 / n,
                    position,
                    velocity,
                    acceleration: s.accel,
                }
            })
            .collect()
    }

    pub fn center_of_mass(&self) -> f64 {
        self.iter_slots().map(|s| s.members as f64 * s.at(self.time).0).sum::<f64>() / self.n as f64
    }

    fn schedule(&mut self, left: usize, right: usize) {
        if left == NONE || right == NONE {
            return;
        }
        let (l, r) = (&self.slots[left], &self.slots[right]);
        let (xl, vl) = l.at(self.time);
        let (xr, vr) = r.at(self.time);
        let mass = (l.members + r.members) as f64 / self.n as f64;
        let event = CollisionEvent {
            time: self.time + contact_delay(xr - xl, vr - vl, mass),
            left,
            right,
            left_version: l.version,
            right_version: r.version,
            left_first: l.first,
        };
        self.queue.push(Reverse(event));
    }

    pub fn is_valid(&self, event: &CollisionEvent) -> bool {
        let (l, r) = (&self.slots[event.left], &self.slots[event.right]);
        l.alive && r.alive && l.version == event.left_version && r.version == event.right_version
    }

    fn dump(&self, around: usize, t: f64) -> String {
        let mut out = format!("t = {t:e}, clusters = {}\n", self.clusters);
        let mut start = around;
        for _ in 0..3 {
            if self.slots[start].prev == NONE {
                break;
            }
            start = self.slots[start].prev;
        }
        let mut cur = start;
        for _ in 0..7 {
            if cur == NONE {
                break;
            }
            let s = &self.slots[cur];
            let (x, v) = s.at(t);
            let _ = writeln!(
                out,
                "  particles {}..{}: x = {x:e}, v = {v:e}, a = {:e}",
                s.first,
                s.first + s.members,
                s.accel
            );
            cur = s.next;
        }
        out
    }

    /// Merges the two clusters of `event` at its time. A stale event is
    /// discarded and `Ok(false)` returned.
    pub fn merge(&mut self, event: &CollisionEvent) -> Result<bool> {
        if !self.is_valid(event) {
            return Ok(false);
        }
        let (li, ri) = (event.left, event.right);
        if self.slots[li].next != ri {
            return Err(Error::Contract("merge of non-adjacent clusters".into()));
        }
        let te = event.time.max(self.time);
        let (xl, vl) = self.slots[li].at(te);
        let (xr, vr) = self.slots[ri].at(te);
        if (xr - xl).abs() > CONTACT_TOLERANCE {
            return Err(Error::Simulation {
                message: format!("contact mismatch {:e} at merge time", xr - xl),
                dump: self.dump(li, te),
            });
        }
        let prev = self.slots[li].prev;
        let next = self.slots[ri].next;
        let out_of_order = (prev != NONE && self.slots[prev].at(te).0 > xl + CONTACT_TOLERANCE)
            || (next != NONE && self.slots[next].at(te).0 < xl - CONTACT_TOLERANCE);
        if out_of_order {
            return Err(Error::Simulation {
                message: "cluster order violated at merge".into(),
                dump: self.dump(li, te),
            });
        }
        let (ml, mr) = (self.slots[li].members, self.slots[ri].members);
        let members = ml + mr;
        let velocity = (ml as f64 * vl + mr as f64 * vr) / members as f64;
        self.merges.push(MergeRecord {
            time: te,
            left_index: self.slots[li].first,
            right_index: self.slots[ri].first,
            left_size: ml,
            right_size: mr,
            position: xl,
        });
        let n = self.n;
        let left = &mut self.slots[li];
        left.members = members;
        left.x0 = xl;
        left.v0 = velocity;
        left.t0 = te;
        left.accel = acceleration(n, left.first, members);
        left.version += 1;
        left.next = next;
        let right = &mut self.slots[ri];
        right.alive = false;
        right.version += 1;
        if next != NONE {
            self.slots[next].prev = li;
        }
        self.clusters -= 1;
        self.time = te;
        self.schedule(prev, li);
        self.schedule(li, next);
        Ok(true)
    }

    /// Processes every collision up to `t_end` (which may be infinite) and
    /// advances the clock to `t_end` when finite.
    pub fn simulate(&mut self, t_end: f64) -> Result<()> {
        if !(t_end >= 0.0) {
            return Err(Error::invalid(format!("t_end = {t_end} must be non-negative")));
        }
        let mut batch = Vec::new();
        while let Some(&Reverse(first)) = self.queue.peek() {
            if first.time > t_end {
                break;
            }
            batch.clear();
            while let Some(&Reverse(ev)) = self.queue.peek() {
                if ev.time > first.time + SIMULTANEOUS || ev.time > t_end {
                    break;
                }
                self.queue.pop();
                if self.is_valid(&ev) {
                    batch.push(ev);
                }
            }
            let Some(pos) = (0..batch.len()).min_by_key(|&i| batch[i].left_first) else {
                continue;
            };
            let chosen = batch.swap_remove(pos);
            for ev in batch.drain(..) {
                self.queue.push(Reverse(ev));
            }
            self.merge(&chosen)?;
        }
        if t_end.is_finite() {
            self.time = self.time.max(t_end);
        }
        Ok(())
    }

    /// `K_n(t)`: clusters alive at time `t`, from the merge history. Only
    /// meaningful for `t` up to the time simulated so far.
    pub fn k_at(&self, t: f64) -> usize {
        self.n - self.merges.iter().filter(|m| m.time <= t).count()
    }

    /// `K_n` on a sorted grid in one pass over the merge history.
    pub fn k_on_grid(&self, grid: &[f64]) -> Vec<usize> {
        let mut times: Vec<f64> = self.merges.iter().map(|m| m.time).collect();
        times.sort_by(f64::total_cmp);
        grid.iter().map(|&t| self.n - times.partition_point(|&m| m <= t)).collect()
    }

    /// Recomputes every invariant from scratch.
    pub fn check_invariants(&self) -> InvariantReport {
        let mut mass_units = 0;
        let mut ordered = true;
        let mut accelerations_ok = true;
        let mut last = f64::NEG_INFINITY;
        let mut expected_first = 0;
        for s in self.iter_slots() {
            let x = s.at(self.time).0;
            ordered &= x >= last - CONTACT_TOLERANCE && s.first == expected_first;
            last = x;
            let right = self.n - mass_units - s.members;
            let a = (right as f64 - mass_units as f64) / self.n as f64;
            accelerations_ok &= (a - s.accel).abs() <= 1e-15;
            mass_units += s.members;
            expected_first += s.members;
        }
        InvariantReport {
            mass_units,
            com_drift: (self.center_of_mass() - self.initial_com).abs(),
            ordered,
            accelerations_ok,
            merges: self.merges.len(),
            clusters: self.clusters,
            k_monotone: self.merges.windows(2).all(|w| w[1].time >= w[0].time - SIMULTANEOUS),
            n: self.n,
        }
    }

    pub fn write_merge_log_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "left_size", "right_size", "position"])?;
        for m in &self.merges {
            w.write_record([
                format_f64(m.time),
                m.left_size.to_string(),
                m.right_size.to_string(),
                format_f64(m.position),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(mass right) - (mass left)` for the cluster of particles
/// `first .. first + members`.
fn acceleration(n: usize, first: usize, members: usize) -> f64 {
    (n as f64 - 2.0 * first as f64 - members as f64) / n as f64
}

/// `n` independent uniform points on `[0, 1]`, sorted.
pub fn init_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SystemState> {
    let mut xs: Vec<f64> = (0..n).map(|_| uniform_open(rng)).collect();
    xs.sort_by(f64::total_cmp);
    SystemState::from_positions(&xs)
}

/// First `n` points of a Poisson process of intensity `n`.
pub fn init_poisson<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SystemState> {
    let rate = n as f64;
    let mut x = 0.0;
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            x += exponential(rng) / rate;
            x
        })
        .collect();
    SystemState::from_positions(&xs)
}

/// Runs a copy of `state` to `t_end`.
pub fn simulate(state: &SystemState, t_end: f64) -> Result<SystemState> {
    let mut s = state.clone();
    s.simulate(t_end)?;
    Ok(s)
}
