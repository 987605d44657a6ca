use thiserror::Error;

/// Errors raised by model construction, simulation, planning and the agents.
#[derive(Debug, Error)]
pub enum Error {
    #[error("stage {stage} is outside the decision range 1..{horizon}")]
    StageOutOfRange { stage: usize, horizon: usize },

    #[error("option {option} cannot be initiated at state {state}, stage {stage}")]
    NotInitiable {
        option: usize,
        state: usize,
        stage: usize,
    },

    #[error("option '{name}' cannot be initiated at state {state}, stage {stage}")]
    OptionRefused {
        name: String,
        state: usize,
        stage: usize,
    },

    #[error("no admissible option at state {state}, stage {stage}")]
    NoAdmissibleOption { state: usize, stage: usize },

    #[error("policy undefined at reachable state {state}, stage {stage}")]
    PolicyUndefined { state: usize, stage: usize },

    #[error("sample must move forward in time (h = {stage}, h' = {next_stage})")]
    NonIncreasingStage { stage: usize, next_stage: usize },

    #[error("malformed probability row: {0}")]
    MalformedRow(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible option budget: {options} options need at least {options} phase-one episodes but only {episodes} are available")]
    BudgetInfeasible { options: usize, episodes: usize },

    #[error("invalid model:\n{0}")]
    InvalidModel(String),

    #[error("model file: {0}")]
    Format(String),

    #[error("run log: {0}")]
    Log(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
