use super::optimistic::{optimistic_expectation, RowScratch};
use super::smdp::best_state;
use crate::estimation::FlatConfidence;
use crate::model::{expectation, FhMdp, StageValueTable};
use crate::{Error, Result};

/// Deterministic Markov policy `(s, h) -> action` of a flat MDP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatPolicy {
    num_states: usize,
    horizon: usize,
    actions: Vec<usize>,
}

impl FlatPolicy {
    pub fn new(num_states: usize, horizon: usize) -> Self {
        Self {
            num_states,
            horizon,
            actions: vec![0; num_states * horizon.saturating_sub(1)],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, s: usize, h: usize) -> usize {
        self.actions[(h - 1) * self.num_states + s]
    }

    pub fn set(&mut self, s: usize, h: usize, a: usize) {
        self.actions[(h - 1) * self.num_states + s] = a;
    }
}

/// Values, Q-values and greedy policy of a flat planning pass.
#[derive(Clone, Debug)]
pub struct FlatSolution {
    num_states: usize,
    num_actions: usize,
    q: Vec<f64>,
    pub values: StageValueTable,
    pub policy: FlatPolicy,
}

impl FlatSolution {
    fn new(num_states: usize, num_actions: usize, horizon: usize) -> Self {
        Self {
            num_states,
            num_actions,
            q: vec![0.0; num_states * num_actions * horizon.saturating_sub(1)],
            values: StageValueTable::new(num_states, horizon),
            policy: FlatPolicy::new(num_states, horizon),
        }
    }

    pub fn q(&self, s: usize, a: usize, h: usize) -> f64 {
        self.q[((h - 1) * self.num_states + s) * self.num_actions + a]
    }

    pub fn value(&self, s: usize, h: usize) -> f64 {
        self.values.value(s, h)
    }

    fn record(&mut self, s: usize, h: usize, qs: impl Iterator<Item = f64>, cap: f64) {
        let base = ((h - 1) * self.num_states + s) * self.num_actions;
        let mut best: Option<(usize, f64)> = None;
        for (a, q) in qs.enumerate() {
            self.q[base + a] = q;
            if best.is_none_or(|(_, b)| q > b) {
                best = Some((a, q));
            }
        }
        if let Some((a, v)) = best {
            self.values.set(s, h, v.min(cap));
            self.policy.set(s, h, a);
        }
    }
}

/// Optimal values and policy of a known flat MDP.
pub fn flat_backward_induction(mdp: &FhMdp) -> FlatSolution {
    let (ns, na, horizon) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let mut sol = FlatSolution::new(ns, na, horizon);
    for h in (1..horizon).rev() {
        for s in 0..ns {
            let qs: Vec<f64> = (0..na)
                .map(|a| mdp.reward(s, a, h) + expectation(mdp.transition(s, a, h), |y| sol.values.value(y, h + 1)))
                .collect();
            sol.record(s, h, qs.into_iter(), f64::INFINITY);
        }
    }
    sol
}

/// Values of a fixed policy on a known flat MDP.
pub fn flat_policy_value(mdp: &FhMdp, policy: &FlatPolicy) -> Result<StageValueTable> {
    if policy.num_states() != mdp.num_states() || policy.horizon() != mdp.horizon() {
        return Err(Error::ShapeMismatch("policy and MDP differ in shape".into()));
    }
    let mut v = StageValueTable::new(mdp.num_states(), mdp.horizon());
    for h in (1..mdp.horizon()).rev() {
        for s in 0..mdp.num_states() {
            let a = policy.get(s, h);
            let q = mdp.reward(s, a, h) + expectation(mdp.transition(s, a, h), |y| v.value(y, h + 1));
            v.set(s, h, q);
        }
    }
    Ok(v)
}

/// Extended value iteration on flat confidence sets. Same tie-breaking and
/// clipping rules as the option-level planner with unit reward caps.
pub fn flat_evi(conf: &FlatConfidence) -> FlatSolution {
    let (ns, na, horizon) = (conf.num_states(), conf.num_actions(), conf.horizon());
    let mut sol = FlatSolution::new(ns, na, horizon);
    let mut scratch = RowScratch::default();
    let mut qs = Vec::with_capacity(na);
    for h in (1..horizon).rev() {
        let (target, target_value) = best_state(sol.values.stage(h + 1)).unwrap_or((0, 0.0));
        for s in 0..ns {
            qs.clear();
            for a in 0..na {
                let cell = conf.cell(s, a, h);
                let reward = (cell.r_hat + cell.beta_r).min(1.0);
                let cont = optimistic_expectation(
                    &cell.p_hat,
                    target,
                    target_value,
                    cell.beta_p,
                    |y| sol.values.value(y, h + 1),
                    &mut scratch,
                );
                qs.push(reward + cont);
            }
            sol.record(s, h, qs.iter().copied(), (horizon - h + 1) as f64);
        }
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::make_chain_env;

    #[test]
    fn chain_optimum_walks_right() {
        let env = make_chain_env(4, 8, 0.0).unwrap();
        let sol = flat_backward_induction(&env.mdp);
        // three steps to reach the end, then four rewarded stages
        assert_eq!(sol.value(0, 1), 4.0);
        assert_eq!(sol.policy.get(0, 1), crate::env::chain::RIGHT);
        let v = flat_policy_value(&env.mdp, &sol.policy).unwrap();
        assert_eq!(v, sol.values);
    }
}
