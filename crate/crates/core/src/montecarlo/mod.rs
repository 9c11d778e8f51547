//! Monte Carlo estimators for the exponential walk and for partial sums of
//! uniform order statistics.
//!
//! Every sample path `i` draws from its own ChaCha stream `(seed, i)`, so an
//! estimate depends only on `(seed, samples, parameters)`: not on the thread
//! count and not on how work is split. The same property gives common random
//! numbers across `n` and `t` for free.

mod estimate;
mod estimators;
mod ks;
mod orderstats;
mod parallel;
mod rng;
mod walk;

pub use estimate::MCEstimate;
pub use estimators::{
    chaining_check, default_horizon, estimate_argmin_prob, estimate_g, estimate_gn, ComparisonReport,
    estimate_partial_density, first_partial_density_check, ChainingReport, GOptions,
    DEFAULT_GUARD, DEFAULT_WIDTH,
};
pub use ks::{ks_two_sample, KsResult};
pub use orderstats::{
    estimate_gn_orderstats, functional_samples, orderstats_functional_sorted,
    orderstats_functional_spacings, OrderStatsEstimate, OrderStatsPath,
};
pub use parallel::McConfig;
pub(crate) use parallel::{in_pool, run_paths as parallel_tally};
pub use rng::{derive_seed, exponential, uniform_open, RngStream, StreamFactory};
pub use walk::{sample_walk, AreaWalk, WalkPath};
