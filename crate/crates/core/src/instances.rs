//! Random instances for oracle tests and benchmarks.

use crate::model::{FhMdp, FhSmdp, HighLevelPolicy, JointOutcome, RewardNoise, SmdpCell};
use crate::rng::SimRng;
use crate::Result;

fn random_weights(n: usize, rng: &mut SimRng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.uniform() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random SMDP where every option is initiable everywhere. Each kernel row
/// has up to `max_support` joint outcomes; rewards are uniform in
/// `[0, E[tau]]`.
pub fn random_smdp(
    num_states: usize,
    num_options: usize,
    horizon: usize,
    max_support: usize,
    rng: &mut SimRng,
) -> Result<FhSmdp> {
    let mut smdp = FhSmdp::new(num_states, num_options, horizon)?;
    for h in 1..horizon {
        let outcomes: Vec<JointOutcome> = ((h + 1)..=horizon)
            .flat_map(|st| (0..num_states).map(move |s| JointOutcome::new(s, st)))
            .collect();
        for s in 0..num_states {
            for o in 0..num_options {
                let k = 1 + rng.below(max_support.max(1).min(outcomes.len()));
                let mut picked: Vec<JointOutcome> = Vec::with_capacity(k);
                while picked.len() < k {
                    let w = outcomes[rng.below(outcomes.len())];
                    if !picked.contains(&w) {
                        picked.push(w);
                    }
                }
                picked.sort();
                let kernel: Vec<(JointOutcome, f64)> = picked.into_iter().zip(random_weights(k, rng)).collect();
                let mean_tau: f64 = kernel.iter().map(|(w, p)| p * (w.stage - h) as f64).sum();
                let reward = rng.uniform() * mean_tau;
                smdp.set_cell(s, o, h, SmdpCell { kernel, reward })?;
            }
        }
    }
    Ok(smdp)
}

/// Copy of `base` with resampled rewards and kernel weights on the same
/// supports.
pub fn perturb_smdp(base: &FhSmdp, rng: &mut SimRng) -> Result<FhSmdp> {
    let mut out = base.clone();
    for h in 1..base.horizon() {
        for s in 0..base.num_states() {
            for o in 0..base.num_options() {
                let Some(cell) = base.cell(s, o, h) else { continue };
                let weights = random_weights(cell.kernel.len(), rng);
                let kernel: Vec<(JointOutcome, f64)> = cell.kernel.iter().map(|&(w, _)| w).zip(weights).collect();
                let mean_tau: f64 = kernel.iter().map(|(w, p)| p * (w.stage - h) as f64).sum();
                out.set_cell(
                    s,
                    o,
                    h,
                    SmdpCell {
                        kernel,
                        reward: rng.uniform() * mean_tau,
                    },
                )?;
            }
        }
    }
    Ok(out)
}

/// Random dense FH-MDP with rewards uniform in `[0, 1]`.
pub fn random_mdp(num_states: usize, num_actions: usize, horizon: usize, rng: &mut SimRng) -> Result<FhMdp> {
    let mut mdp = FhMdp::new(num_states, num_actions, horizon, RewardNoise::Deterministic)?;
    for h in 1..=horizon {
        for s in 0..num_states {
            for a in 0..num_actions {
                let row = (0..num_states).zip(random_weights(num_states, rng)).collect();
                mdp.set_transition(s, a, h, row);
                mdp.set_reward(s, a, h, rng.uniform());
            }
        }
    }
    Ok(mdp)
}

/// Uniformly random deterministic policy over the options each cell allows.
pub fn random_policy(smdp: &FhSmdp, rng: &mut SimRng) -> HighLevelPolicy {
    let mut p = HighLevelPolicy::undefined(smdp.num_states(), smdp.horizon());
    for h in 1..smdp.horizon() {
        for s in 0..smdp.num_states() {
            let allowed: Vec<usize> = smdp.options_at(s, h).collect();
            if !allowed.is_empty() {
                p.set(s, h, Some(allowed[rng.below(allowed.len())]));
            }
        }
    }
    p
}
