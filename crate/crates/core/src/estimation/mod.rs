//! Streaming statistics, concentration radii and confidence sets.

mod bonus;
mod confidence;
mod stats;

pub use bonus::{
    empirical_bernstein_radius, reward_bonus, split_confidence, transition_bonus, weissman_radius, MAX_L1_RADIUS,
};
pub use confidence::{
    empirical_model, flat_empirical_model, per_cell_delta, ConfidenceCell, ConfidenceModel, FlatConfidence, FlatConfidenceCell,
    OutcomeSpace,
};
pub use stats::{CellStats, FlatStats, OutcomeCount, RewardMoments, SufficientStats};
