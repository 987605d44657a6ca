//! Regret accounting, bound shapes, holding-time statistics and the
//! performance-difference check.

mod bounds;
mod durations;
mod pdl;
mod regret;

pub use bounds::{
    crossover_episodes, fixed_duration_regret_bound, flat_regret_bound, option_regret_bound, regret_ratio,
    regret_ratio_alpha, renewal_bound, two_phase_regret_bound, BoundInputs, BoundReport,
};
pub use durations::{option_stats, option_stats_from_counts, option_stats_where, OptionStatsSummary};
pub use pdl::{decision_occupancy, expected_decisions, verify_pdl, PdlCheck};
pub use regret::{bias_term, compute_regret, decile_means, empirical_d_vs_bound, fit_power_law, CoverageReport};
