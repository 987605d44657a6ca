//! Ground-truth environments, option libraries, the exact options-to-SMDP
//! flattening and seeded simulation.

pub mod chain;
mod flatten;
pub mod four_rooms;
mod scaffold;
mod simulate;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use chain::{build_chain, make_chain_env, ChainParams};
pub use flatten::flatten_to_smdp;
pub use four_rooms::{make_four_rooms_env, FourRoomsParams, Layout};
pub use scaffold::{Scaffold, SubMdp};
pub use simulate::{
    execute_option, execute_option_with, step_primitive, Decision, EpisodeTrace, OptionExecution, PrimitiveStep,
};

use crate::model::{fixed_duration_options, primitive_options, FhMdp, OptionSet, RewardNoise};
use crate::Result;

/// A primitive model together with its option library and start state.
#[derive(Clone, Debug)]
pub struct Environment {
    pub name: String,
    pub mdp: FhMdp,
    pub options: OptionSet,
    pub start: usize,
    /// Option-learning sub-problems, one per option that has one.
    pub scaffolds: Vec<Scaffold>,
}

/// Environment preset selectable from a run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    Chain {
        length: usize,
        horizon: usize,
        #[serde(default)]
        noise: f64,
        #[serde(default)]
        reward_noise: RewardNoise,
        #[serde(default)]
        strides: Option<Vec<usize>>,
    },
    FourRooms {
        width: usize,
        height: usize,
        horizon: usize,
        #[serde(default)]
        noise: f64,
        #[serde(default)]
        reward_noise: RewardNoise,
        #[serde(default)]
        option_horizon: Option<usize>,
    },
    /// A model file in the crate's structured-text format.
    File { path: PathBuf },
}

/// Which option library the agent is given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OptionSetSpec {
    /// The environment's own library.
    #[default]
    Env,
    /// One single-step option per primitive action.
    Primitive,
    /// Repeat one primitive action for exactly `tau` steps.
    FixedDuration { tau: usize },
}

impl EnvSpec {
    pub fn build(&self) -> Result<Environment> {
        match self {
            EnvSpec::Chain {
                length,
                horizon,
                noise,
                reward_noise,
                strides,
            } => {
                let mut p = ChainParams::new(*length, *horizon, *noise);
                p.reward_noise = *reward_noise;
                if let Some(strides) = strides {
                    p.strides = strides.clone();
                }
                build_chain(&p)
            }
            EnvSpec::FourRooms {
                width,
                height,
                horizon,
                noise,
                reward_noise,
                option_horizon,
            } => {
                let mut p = FourRoomsParams::new(*width, *height, *noise);
                p.reward_noise = *reward_noise;
                if let Some(ho) = option_horizon {
                    p.option_horizon = *ho;
                }
                make_four_rooms_env(&p, *horizon)
            }
            EnvSpec::File { path } => crate::format::read_model_file(path),
        }
    }
}

impl OptionSetSpec {
    pub fn build(&self, env: &Environment) -> Result<OptionSet> {
        match self {
            OptionSetSpec::Env => Ok(env.options.clone()),
            OptionSetSpec::Primitive => Ok(primitive_options(&env.mdp)),
            OptionSetSpec::FixedDuration { tau } => fixed_duration_options(&env.mdp, *tau),
        }
    }
}
