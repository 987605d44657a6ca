use crate::model::{FhMdp, OptionSpec, RewardNoise};
use crate::{Error, Result};

/// The sub-problem an option's internal policy is learned on: a subset of
/// states and actions, a short horizon and a goal-reaching sub-reward that
/// pays 1 per stage spent in a target state.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaffold {
    /// Id of the option this scaffold learns a policy for.
    pub option: usize,
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    pub horizon: usize,
    pub targets: Vec<usize>,
    /// Start states of the learning episodes, drawn uniformly.
    pub starts: Vec<usize>,
}

/// A scaffold instantiated on a concrete model. Local state `i` is
/// `to_global[i]`; the extra last state absorbs mass that leaves the scaffold.
#[derive(Clone, Debug)]
pub struct SubMdp {
    pub mdp: FhMdp,
    pub to_global: Vec<usize>,
    pub outside: usize,
    pub starts: Vec<usize>,
}

impl SubMdp {
    pub fn local(&self, global: usize) -> Option<usize> {
        self.to_global.iter().position(|&g| g == global)
    }
}

impl Scaffold {
    pub fn check(&self, model: &FhMdp) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("scaffold for option {}: {msg}", self.option)));
        if self.states.is_empty() || self.actions.is_empty() {
            return bad("empty state or action subset".into());
        }
        if let Some(&s) = self.states.iter().find(|&&s| s >= model.num_states()) {
            return bad(format!("state {s} outside the model"));
        }
        if let Some(&a) = self.actions.iter().find(|&&a| a >= model.num_actions()) {
            return bad(format!("action {a} outside the model"));
        }
        if self.horizon < 2 || self.horizon > model.horizon() {
            return bad(format!("horizon {} not in 2..={}", self.horizon, model.horizon()));
        }
        if let Some(&t) = self.targets.iter().chain(&self.starts).find(|t| !self.states.contains(t)) {
            return bad(format!("target/start {t} not in the state subset"));
        }
        if self.starts.is_empty() {
            return bad("no start states".into());
        }
        Ok(())
    }

    /// Builds the restricted FH-MDP with the goal-reaching sub-reward.
    pub fn sub_mdp(&self, model: &FhMdp) -> Result<SubMdp> {
        self.check(model)?;
        let n = self.states.len();
        let outside = n;
        let local = |g: usize| self.states.iter().position(|&x| x == g).unwrap_or(outside);
        let mut mdp = FhMdp::new(n + 1, self.actions.len(), self.horizon, RewardNoise::Deterministic)?;
        for h in 1..=self.horizon {
            for (la, &a) in self.actions.iter().enumerate() {
                mdp.set_transition(outside, la, h, vec![(outside, 1.0)]);
                for (x, &g) in self.states.iter().enumerate() {
                    if self.targets.contains(&g) {
                        mdp.set_transition(x, la, h, vec![(x, 1.0)]);
                        mdp.set_reward(x, la, h, 1.0);
                    } else {
                        let row = model.transition(g, a, h).iter().map(|&(y, p)| (local(y), p)).collect();
                        mdp.set_transition(x, la, h, row);
                    }
                }
            }
        }
        Ok(SubMdp {
            mdp,
            to_global: self.states.clone(),
            outside,
            starts: self.starts.iter().map(|&s| local(s)).collect(),
        })
    }

    /// Copy of `template` whose internal policy on the scaffold states is
    /// `local_action(x)` for local state `x`, at every stage. Targets keep
    /// the template's action: the sub-reward pays there whatever is played.
    pub fn embed_policy(&self, template: &OptionSpec, local_action: impl Fn(usize) -> usize) -> OptionSpec {
        let mut o = template.clone();
        for (x, &g) in self.states.iter().enumerate() {
            if self.targets.contains(&g) {
                continue;
            }
            let a = self.actions[local_action(x)];
            for h in 1..=o.horizon() {
                o.set_action(g, h, Some(a));
            }
        }
        o
    }
}
