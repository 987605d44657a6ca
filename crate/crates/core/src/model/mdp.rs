use serde::{Deserialize, Serialize};

use super::validation::{ValidationReport, Violation};
use crate::{Error, Result};

/// Tolerance on the unit-sum invariant of probability rows.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// How primitive rewards are sampled around their mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardNoise {
    #[default]
    Deterministic,
    Bernoulli,
}

/// Finite-horizon MDP with stage-dependent sparse transitions.
///
/// Stages are 1-based. Rows are stored for every `h` in `1..=horizon`
/// even though the last one is never stepped from.
#[derive(Clone, Debug, PartialEq)]
pub struct FhMdp {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    transitions: Vec<Vec<(usize, f64)>>,
    rewards: Vec<f64>,
    reward_noise: RewardNoise,
}

impl FhMdp {
    /// Empty model: all rows unset, all rewards zero. Fill with the setters.
    pub fn new(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        reward_noise: RewardNoise,
    ) -> Result<Self> {
        if num_states == 0 || num_actions == 0 || horizon == 0 {
            return Err(Error::InvalidParameter(format!(
                "model dimensions must be positive (S={num_states}, A={num_actions}, H={horizon})"
            )));
        }
        let cells = num_states * num_actions * horizon;
        Ok(Self {
            num_states,
            num_actions,
            horizon,
            transitions: vec![Vec::new(); cells],
            rewards: vec![0.0; cells],
            reward_noise,
        })
    }

    /// Builds a model from closures over `(s, a, h)`.
    pub fn from_fn(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        reward_noise: RewardNoise,
        mut transition: impl FnMut(usize, usize, usize) -> Vec<(usize, f64)>,
        mut reward: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut mdp = Self::new(num_states, num_actions, horizon, reward_noise)?;
        for h in 1..=horizon {
            for s in 0..num_states {
                for a in 0..num_actions {
                    let row = transition(s, a, h);
                    mdp.set_transition(s, a, h, row);
                    mdp.set_reward(s, a, h, reward(s, a, h));
                }
            }
        }
        Ok(mdp)
    }

    /// Stage-homogeneous model: the same dynamics at every stage.
    pub fn stationary(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        reward_noise: RewardNoise,
        mut transition: impl FnMut(usize, usize) -> Vec<(usize, f64)>,
        mut reward: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut mdp = Self::new(num_states, num_actions, horizon, reward_noise)?;
        for s in 0..num_states {
            for a in 0..num_actions {
                let row = normalize_row(transition(s, a));
                let r = reward(s, a);
                for h in 1..=horizon {
                    let i = mdp.index(s, a, h);
                    mdp.transitions[i] = row.clone();
                    mdp.rewards[i] = r;
                }
            }
        }
        Ok(mdp)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn reward_noise(&self) -> RewardNoise {
        self.reward_noise
    }

    fn index(&self, s: usize, a: usize, h: usize) -> usize {
        debug_assert!(s < self.num_states && a < self.num_actions);
        debug_assert!(h >= 1 && h <= self.horizon, "stage {h} out of 1..={}", self.horizon);
        ((h - 1) * self.num_states + s) * self.num_actions + a
    }

    /// Sparse row `p(. | s, a, h)`, sorted by next state.
    pub fn transition(&self, s: usize, a: usize, h: usize) -> &[(usize, f64)] {
        &self.transitions[self.index(s, a, h)]
    }

    pub fn reward(&self, s: usize, a: usize, h: usize) -> f64 {
        self.rewards[self.index(s, a, h)]
    }

    /// Stores a row after merging duplicate targets, dropping zeros and
    /// sorting. The row is not renormalized.
    pub fn set_transition(&mut self, s: usize, a: usize, h: usize, row: Vec<(usize, f64)>) {
        let i = self.index(s, a, h);
        self.transitions[i] = normalize_row(row);
    }

    pub fn set_reward(&mut self, s: usize, a: usize, h: usize, mean: f64) {
        let i = self.index(s, a, h);
        self.rewards[i] = mean;
    }

    /// Invariant check: row sums, non-negativity, state range, reward range.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for h in 1..=self.horizon {
            for s in 0..self.num_states {
                for a in 0..self.num_actions {
                    let row = self.transition(s, a, h);
                    let mut sum = 0.0;
                    for &(next, p) in row {
                        if next >= self.num_states {
                            report.push(Violation::TargetOutOfRange {
                                state: s,
                                action: a,
                                stage: h,
                                next,
                            });
                        }
                        if p < 0.0 {
                            report.push(Violation::NegativeProbability {
                                state: s,
                                action: a,
                                stage: h,
                                next,
                                prob: p,
                            });
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > ROW_SUM_TOL {
                        report.push(Violation::RowSum {
                            state: s,
                            action: a,
                            stage: h,
                            sum,
                        });
                    }
                    let r = self.reward(s, a, h);
                    if !(0.0..=1.0).contains(&r) {
                        report.push(Violation::RewardOutOfRange {
                            state: s,
                            action: a,
                            stage: h,
                            mean: r,
                        });
                    }
                }
            }
        }
        report
    }
}

/// Merges duplicates, drops exact zeros and sorts by index.
fn normalize_row(mut row: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    row.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (i, p) in row {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += p,
            _ => out.push((i, p)),
        }
    }
    out.retain(|&(_, p)| p != 0.0);
    out
}
