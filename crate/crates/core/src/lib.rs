//! Regret-minimizing learning in finite-horizon semi-Markov decision
//! processes with options.

mod error;

pub mod agents;
pub mod analysis;
pub mod env;
pub mod estimation;
pub mod format;
pub mod instances;
pub mod model;
pub mod planning;
pub mod rng;

pub use env::{Decision, Environment, EpisodeTrace};
pub use error::{Error, Result};
pub use model::{FhMdp, FhSmdp, HighLevelPolicy, JointOutcome, OptionSet, OptionSpec, StageValueTable};
pub use rng::SimRng;
