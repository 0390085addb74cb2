//! Simple random walks: closed-walk probabilities, exact and Monte Carlo
//! support distributions, exact sampling conditioned on closure, and closed
//! walk counts on the infinite regular tree.

mod cyclesup;
mod exact;
mod mc;
mod sampler;
mod tree;

pub use cyclesup::{cyclesup_check, CycleSupVariant};
pub use exact::{
    closed_walk_prob, closed_walk_probs, support_counts_exact, support_profile_exact, Mass, ProfileMode,
    ratio_string, ratio_to_f64, SupportCounts, SupportProfile, MAX_EXACT_VERTICES,
};
pub use mc::{support_profile_mc, support_profile_mc_with, McOptions, DEFAULT_WORKERS};
pub use sampler::{sample_closed_walk, ClosedWalkSampler, WalkSample};
pub use tree::tree_closed_walk_count;
