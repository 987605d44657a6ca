//! Formal objects: the primitive FH-MDP, options, the FH-SMDP and
//! high-level policies with their value tables.

mod mdp;
mod options;
mod policy;
mod smdp;
mod validation;

pub use mdp::{FhMdp, RewardNoise, ROW_SUM_TOL};
pub use options::{fixed_duration_options, primitive_options, OptionSet, OptionSpec};
pub use policy::{expectation, policy_value, HighLevelPolicy, StageValueTable};
pub use smdp::{FhSmdp, JointOutcome, SmdpCell};
pub use validation::{ValidationReport, Violation};

/// Invariant report for a primitive model.
pub fn validate_mdp(model: &FhMdp) -> ValidationReport {
    model.validate()
}

/// Admissibility, boundary termination and internal-policy coverage.
pub fn validate_option_set(options: &OptionSet, model: &FhMdp) -> ValidationReport {
    options.validate(model)
}
