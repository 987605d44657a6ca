//! The learners: option-level optimistic learning, the flat baseline and
//! the two-phase option-learning agent.

mod flat;
mod log;
mod smdp;
mod two_phase;

use serde::{Deserialize, Serialize};

pub use flat::run_flat_ucrl;
pub use log::{EpisodeRecord, Phase, RunLog};
pub use smdp::run_fh_smdp_ucrl;
pub use two_phase::{allocate_option_budget, learn_option_policy, run_two_phase, LearnedOption};

use crate::env::{EnvSpec, OptionSetSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    SmdpUcrl,
    FlatUcrl,
    TwoPhase,
}

impl AgentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AgentKind::SmdpUcrl => "smdp-ucrl",
            AgentKind::FlatUcrl => "flat-ucrl",
            AgentKind::TwoPhase => "two-phase",
        }
    }
}

/// Algorithm parameters shared by every learner.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentParams {
    pub episodes: usize,
    pub delta: f64,
    pub seed: u64,
    /// Support size in the transition radius; defaults to `S`.
    pub support_size: Option<usize>,
    /// Per-scaffold option budgets of the two-phase agent.
    pub budgets: Option<Vec<usize>>,
}

impl AgentParams {
    pub fn new(episodes: usize, delta: f64, seed: u64) -> Self {
        Self {
            episodes,
            delta,
            seed,
            support_size: None,
            budgets: None,
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::InvalidParameter("episodes must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.support_size == Some(0) {
            return Err(Error::InvalidParameter("support_size must be positive".into()));
        }
        Ok(())
    }
}

/// One fully specified agent run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub agent: AgentKind,
    pub episodes: usize,
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_size: Option<usize>,
    pub env: EnvSpec,
    #[serde(default)]
    pub options: OptionSetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn params(&self) -> AgentParams {
        AgentParams {
            episodes: self.episodes,
            delta: self.delta,
            seed: self.seed,
            support_size: self.support_size,
            budgets: self.budgets.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().check()?;
        if let Some(b) = &self.budgets {
            if self.agent != AgentKind::TwoPhase {
                return Err(Error::InvalidParameter("budgets only apply to the two-phase agent".into()));
            }
            if b.iter().sum::<usize>() >= self.episodes {
                return Err(Error::BudgetInfeasible {
                    options: b.len(),
                    episodes: self.episodes,
                });
            }
        }
        if self.agent == AgentKind::TwoPhase && self.options != OptionSetSpec::Env {
            return Err(Error::InvalidParameter(
                "the two-phase agent learns the environment's own options".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<RunLog> {
        self.validate()?;
        let env = self.env.build()?;
        let params = self.params();
        match self.agent {
            AgentKind::SmdpUcrl => run_fh_smdp_ucrl(&env, &self.options.build(&env)?, &params),
            AgentKind::FlatUcrl => run_flat_ucrl(&env, &params),
            AgentKind::TwoPhase => run_two_phase(&env, &env.scaffolds, &params),
        }
    }
}
