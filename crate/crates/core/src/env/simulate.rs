use crate::model::{FhMdp, OptionSpec, RewardNoise};
use crate::rng::SimRng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveStep {
    pub state: usize,
    pub action: usize,
    pub stage: usize,
    pub next_state: usize,
    pub reward: f64,
}

/// One option-level transition `(s, o, h, s', h', r, tau)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub state: usize,
    pub option: usize,
    pub stage: usize,
    pub next_state: usize,
    pub next_stage: usize,
    pub reward: f64,
    pub duration: usize,
}

/// Everything that happened in one episode, at both time scales.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeTrace {
    pub decisions: Vec<Decision>,
    pub primitive_steps: Vec<PrimitiveStep>,
}

impl EpisodeTrace {
    pub fn total_reward(&self) -> f64 {
        self.decisions.iter().map(|d| d.reward).sum()
    }

    /// `tau = h' - h` for every decision, consecutive decisions chain, the
    /// first starts at stage 1 and the last ends at `horizon`.
    pub fn is_chained(&self, horizon: usize) -> bool {
        let mut stage = 1;
        let mut state = None;
        for d in &self.decisions {
            if d.stage != stage || d.next_stage <= d.stage || d.duration != d.next_stage - d.stage {
                return false;
            }
            if state.is_some_and(|s| s != d.state) {
                return false;
            }
            stage = d.next_stage;
            state = Some(d.next_state);
        }
        stage == horizon || (horizon == 1 && self.decisions.is_empty())
    }
}

/// Samples `s' ~ p(.|s,a,h)` and a reward with mean `r(s,a,h)`.
///
/// Consumes one uniform for the transition and, for Bernoulli rewards,
/// one more for the reward.
pub fn step_primitive(model: &FhMdp, s: usize, a: usize, h: usize, rng: &mut SimRng) -> Result<(usize, f64)> {
    if h == 0 || h >= model.horizon() {
        return Err(Error::StageOutOfRange {
            stage: h,
            horizon: model.horizon(),
        });
    }
    let row = model.transition(s, a, h);
    if row.is_empty() {
        return Err(Error::MalformedRow(format!("empty transition row at (s={s}, a={a}, h={h})")));
    }
    let next = rng.categorical(row);
    let mean = model.reward(s, a, h);
    let reward = match model.reward_noise() {
        RewardNoise::Deterministic => mean,
        RewardNoise::Bernoulli => {
            if rng.bernoulli(mean) {
                1.0
            } else {
                0.0
            }
        }
    };
    Ok((next, reward))
}

/// Result of running an option to termination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptionExecution {
    pub next_state: usize,
    pub next_stage: usize,
    pub reward: f64,
    pub duration: usize,
}

/// Runs `option` from `(s, h)` until it terminates.
///
/// After every primitive step the option stops with probability
/// `termination(s', h')`; at stage `H` it always stops. A termination
/// probability strictly between 0 and 1 consumes one uniform.
pub fn execute_option(
    model: &FhMdp,
    option: &OptionSpec,
    s: usize,
    h: usize,
    rng: &mut SimRng,
) -> Result<OptionExecution> {
    execute_option_with(model, option, s, h, rng, |_| {})
}

/// [`execute_option`] reporting every primitive step to `on_step`.
pub fn execute_option_with(
    model: &FhMdp,
    option: &OptionSpec,
    s: usize,
    h: usize,
    rng: &mut SimRng,
    mut on_step: impl FnMut(PrimitiveStep),
) -> Result<OptionExecution> {
    let horizon = model.horizon();
    if h == 0 || h >= horizon {
        return Err(Error::StageOutOfRange { stage: h, horizon });
    }
    if !option.is_initiable(s, h) {
        return Err(Error::OptionRefused {
            name: option.name.clone(),
            state: s,
            stage: h,
        });
    }
    let (mut state, mut stage) = (s, h);
    let mut reward = 0.0;
    loop {
        let action = option
            .action(state, stage)
            .ok_or(Error::PolicyUndefined { state, stage })?;
        let (next, r) = step_primitive(model, state, action, stage, rng)?;
        on_step(PrimitiveStep {
            state,
            action,
            stage,
            next_state: next,
            reward: r,
        });
        reward += r;
        state = next;
        stage += 1;
        if stage == horizon {
            break;
        }
        let beta = option.termination(state, stage);
        if beta >= 1.0 || (beta > 0.0 && rng.bernoulli(beta)) {
            break;
        }
    }
    Ok(OptionExecution {
        next_state: state,
        next_stage: stage,
        reward,
        duration: stage - h,
    })
}
