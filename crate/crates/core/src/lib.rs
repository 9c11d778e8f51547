//! Verification toolkit for the infimum of normalized areas of an
//! exponential random walk.
//!
//! For a walk `S_i` with standard exponential increments the normalized
//! areas are `Y_k = 2/(k(k+1)) * (S_1 + ... + S_k)`, and
//! `G(t) = P{inf_k Y_k >= t}`. The crate confirms
//! `G(t) = sqrt(1-t) exp(-t/2)` and the cluster-count law `K(t) = 1 - t^2`
//! of the one-dimensional sticky particle system by several independent
//! routes:
//!
//! * [`exact`]: exact rational sequences, matrices and polytope volumes;
//! * [`closedform`]: closed forms, generating-function series and an ODE
//!   integrator in double precision;
//! * [`montecarlo`]: reproducible parallel estimators for the walk and for
//!   uniform order statistics;
//! * [`sticky`]: an event-driven sticky particle simulator;
//! * [`cli`]: the command-line front end and verification report.

pub mod cli;
pub mod closedform;
pub mod curve;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod sticky;

pub use error::{Error, Result};
