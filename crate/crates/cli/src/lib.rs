//! Experiment batches, comparison tables and plots on top of `fhsmdp-core`.

mod compare;
mod config;
mod experiment;
mod plot;

use std::path::Path;

use anyhow::Result;
use fhsmdp_core::model::ValidationReport;
use fhsmdp_core::Environment;

pub use compare::{compare_runs, load_run, Comparison, LoadedRun, Pairing};
pub use config::{BeatsCheck, Checks, ExperimentConfig};
pub use experiment::{run_config, run_experiment, CheckResult, Dims, Outcome, RunMeta, RunOptions};

/// Reads a model file and checks the model and its options.
pub fn validate_model(path: &Path) -> Result<(Environment, ValidationReport)> {
    let env = fhsmdp_core::format::read_model_file(path)?;
    let mut report = env.mdp.validate();
    report.extend(env.options.validate_from(&env.mdp, env.start));
    Ok((env, report))
}
