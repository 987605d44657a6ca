use super::bonus::{empirical_bernstein_radius, split_confidence, weissman_radius};
use super::stats::{FlatStats, SufficientStats};
use crate::model::{FhMdp, FhSmdp, JointOutcome, OptionSet, RewardNoise, SmdpCell};
use crate::{Error, Result};

/// Stages at which each option can terminate, per decision stage. This is
/// the outcome space the learner optimizes over; it only depends on the
/// termination maps, never on the unknown dynamics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSpace {
    num_states: usize,
    num_options: usize,
    horizon: usize,
    stages: Vec<Vec<usize>>,
}

impl OutcomeSpace {
    /// Every later stage is possible for every option.
    pub fn unrestricted(num_states: usize, num_options: usize, horizon: usize) -> Self {
        Self::from_fn(num_states, num_options, horizon, |_, h| ((h + 1)..=horizon).collect())
    }

    /// Single-step outcomes only, as for primitive actions.
    pub fn single_step(num_states: usize, num_options: usize, horizon: usize) -> Self {
        Self::from_fn(num_states, num_options, horizon, |_, h| vec![h + 1])
    }

    pub fn from_options(options: &OptionSet, num_states: usize, horizon: usize) -> Self {
        Self::from_fn(num_states, options.len(), horizon, |o, h| options.options[o].feasible_stages(h))
    }

    fn from_fn(
        num_states: usize,
        num_options: usize,
        horizon: usize,
        f: impl Fn(usize, usize) -> Vec<usize>,
    ) -> Self {
        let mut stages = Vec::with_capacity(num_options * horizon.saturating_sub(1));
        for h in 1..horizon {
            for o in 0..num_options {
                stages.push(f(o, h));
            }
        }
        Self {
            num_states,
            num_options,
            horizon,
            stages,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_options(&self) -> usize {
        self.num_options
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Feasible termination stages of option `o` started at `h`, ascending.
    pub fn stages(&self, o: usize, h: usize) -> &[usize] {
        &self.stages[(h - 1) * self.num_options + o]
    }

    /// Number of joint outcomes of `(o, h)`.
    pub fn len(&self, o: usize, h: usize) -> usize {
        self.num_states * self.stages(o, h).len()
    }

    /// Largest cumulative reward `(o, h)` can collect: its longest feasible
    /// duration, which never exceeds `H - h`.
    pub fn reward_cap(&self, o: usize, h: usize) -> f64 {
        match self.stages(o, h).last() {
            Some(&last) => (last - h) as f64,
            None => (self.horizon - h + 1) as f64,
        }
    }

    /// Joint outcomes of `(o, h)` in canonical order.
    pub fn outcomes(&self, o: usize, h: usize) -> impl Iterator<Item = JointOutcome> + '_ {
        self.stages(o, h)
            .iter()
            .flat_map(move |&st| (0..self.num_states).map(move |s| JointOutcome::new(s, st)))
    }
}

/// Empirical estimates and confidence radii of one `(s, o, h)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceCell {
    pub visits: u64,
    /// Empirical kernel, sorted by outcome. Empty when the cell has no
    /// data, which stands for the uniform distribution over the outcome
    /// space together with `beta_p = 2`.
    pub p_hat: Vec<(JointOutcome, f64)>,
    pub r_hat: f64,
    pub beta_r: f64,
    pub beta_p: f64,
    pub reward_cap: f64,
}

/// Confidence sets of every initiable `(s, o, h)` cell.
#[derive(Clone, Debug)]
pub struct ConfidenceModel {
    space: OutcomeSpace,
    cells: Vec<Option<ConfidenceCell>>,
}

impl ConfidenceModel {
    /// Builds the confidence model from counts. Only cells for which
    /// `initiable(s, o, h)` holds are populated.
    pub fn build(
        stats: &SufficientStats,
        space: &OutcomeSpace,
        initiable: impl Fn(usize, usize, usize) -> bool,
        delta_prime: f64,
        support_size: usize,
    ) -> Result<Self> {
        check_shape(stats, space)?;
        let (ns, no, horizon) = (space.num_states, space.num_options, space.horizon);
        let mut cells = vec![None; ns * no * horizon.saturating_sub(1)];
        for h in 1..horizon {
            for s in 0..ns {
                for o in 0..no {
                    if !initiable(s, o, h) {
                        continue;
                    }
                    let c = stats.cell(s, o, h);
                    cells[((h - 1) * ns + s) * no + o] = Some(ConfidenceCell {
                        visits: c.visits,
                        p_hat: c.empirical_row(),
                        r_hat: c.reward.mean(),
                        beta_r: empirical_bernstein_radius(
                            c.visits,
                            c.reward.variance(),
                            delta_prime,
                            (horizon - h + 1) as f64,
                        ),
                        beta_p: weissman_radius(c.visits, delta_prime, support_size),
                        reward_cap: space.reward_cap(o, h),
                    });
                }
            }
        }
        Ok(Self {
            space: space.clone(),
            cells,
        })
    }

    /// Confidence model centred on a known SMDP with fixed radii.
    pub fn from_smdp(smdp: &FhSmdp, space: &OutcomeSpace, beta_r: f64, beta_p: f64) -> Result<Self> {
        if smdp.num_states() != space.num_states
            || smdp.num_options() != space.num_options
            || smdp.horizon() != space.horizon
        {
            return Err(Error::ShapeMismatch("SMDP and outcome space differ in shape".into()));
        }
        let (ns, no, horizon) = (space.num_states, space.num_options, space.horizon);
        let mut cells = vec![None; ns * no * horizon.saturating_sub(1)];
        for h in 1..horizon {
            for s in 0..ns {
                for o in 0..no {
                    if let Some(cell) = smdp.cell(s, o, h) {
                        cells[((h - 1) * ns + s) * no + o] = Some(ConfidenceCell {
                            visits: 1,
                            p_hat: cell.kernel.clone(),
                            r_hat: cell.reward,
                            beta_r,
                            beta_p,
                            reward_cap: space.reward_cap(o, h),
                        });
                    }
                }
            }
        }
        Ok(Self {
            space: space.clone(),
            cells,
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn num_states(&self) -> usize {
        self.space.num_states
    }

    pub fn num_options(&self) -> usize {
        self.space.num_options
    }

    pub fn horizon(&self) -> usize {
        self.space.horizon
    }

    pub fn cell(&self, s: usize, o: usize, h: usize) -> Option<&ConfidenceCell> {
        let (ns, no) = (self.space.num_states, self.space.num_options);
        self.cells[((h - 1) * ns + s) * no + o].as_ref()
    }

    pub fn cell_mut(&mut self, s: usize, o: usize, h: usize) -> Option<&mut ConfidenceCell> {
        let (ns, no) = (self.space.num_states, self.space.num_options);
        self.cells[((h - 1) * ns + s) * no + o].as_mut()
    }
}

fn check_shape(stats: &SufficientStats, space: &OutcomeSpace) -> Result<()> {
    if stats.num_states() != space.num_states
        || stats.num_options() != space.num_options
        || stats.horizon() != space.horizon
    {
        return Err(Error::ShapeMismatch(format!(
            "statistics (S={}, O={}, H={}) do not match outcome space (S={}, O={}, H={})",
            stats.num_states(),
            stats.num_options(),
            stats.horizon(),
            space.num_states,
            space.num_options,
            space.horizon
        )));
    }
    Ok(())
}

/// Point estimates of a flat model. Unvisited cells move uniformly over
/// all states and pay nothing.
pub fn flat_empirical_model(stats: &FlatStats) -> Result<FhMdp> {
    let (ns, na, horizon) = (stats.num_states(), stats.num_actions(), stats.horizon());
    let mut mdp = FhMdp::new(ns, na, horizon, RewardNoise::Deterministic)?;
    for h in 1..=horizon {
        for s in 0..ns {
            for a in 0..na {
                if h < horizon && stats.visits(s, a, h) > 0 {
                    mdp.set_transition(s, a, h, stats.empirical_row(s, a, h));
                    mdp.set_reward(s, a, h, stats.reward_moments(s, a, h).mean());
                } else {
                    mdp.set_transition(s, a, h, (0..ns).map(|x| (x, 1.0 / ns as f64)).collect());
                }
            }
        }
    }
    Ok(mdp)
}

/// Point estimates `(p_hat, r_hat)` as an SMDP. Unvisited initiable cells
/// get the uniform distribution over their outcome space and zero reward.
pub fn empirical_model(
    stats: &SufficientStats,
    space: &OutcomeSpace,
    initiable: impl Fn(usize, usize, usize) -> bool,
) -> Result<FhSmdp> {
    check_shape(stats, space)?;
    let mut smdp = FhSmdp::new(space.num_states, space.num_options, space.horizon)?;
    for h in 1..space.horizon {
        for s in 0..space.num_states {
            for o in 0..space.num_options {
                if !initiable(s, o, h) {
                    continue;
                }
                let c = stats.cell(s, o, h);
                let cell = if c.visits == 0 {
                    let n = space.len(o, h) as f64;
                    SmdpCell {
                        kernel: space.outcomes(o, h).map(|w| (w, 1.0 / n)).collect(),
                        reward: 0.0,
                    }
                } else {
                    SmdpCell {
                        kernel: c.empirical_row(),
                        reward: c.reward.mean(),
                    }
                };
                smdp.set_cell(s, o, h, cell)?;
            }
        }
    }
    Ok(smdp)
}

/// Flat confidence cell for a primitive `(s, a, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatConfidenceCell {
    pub visits: u64,
    /// Empty when unvisited.
    pub p_hat: Vec<(usize, f64)>,
    pub r_hat: f64,
    pub beta_r: f64,
    pub beta_p: f64,
}

/// Confidence sets of a flat finite-horizon MDP.
#[derive(Clone, Debug)]
pub struct FlatConfidence {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    cells: Vec<FlatConfidenceCell>,
}

impl FlatConfidence {
    pub fn build(stats: &FlatStats, delta_prime: f64, support_size: usize) -> Self {
        let (ns, na, horizon) = (stats.num_states(), stats.num_actions(), stats.horizon());
        let mut cells = Vec::with_capacity(ns * na * horizon.saturating_sub(1));
        for h in 1..horizon {
            for s in 0..ns {
                for a in 0..na {
                    let n = stats.visits(s, a, h);
                    let m = stats.reward_moments(s, a, h);
                    cells.push(FlatConfidenceCell {
                        visits: n,
                        p_hat: stats.empirical_row(s, a, h),
                        r_hat: m.mean(),
                        beta_r: empirical_bernstein_radius(n, m.variance(), delta_prime, (horizon - h + 1) as f64),
                        beta_p: weissman_radius(n, delta_prime, support_size),
                    });
                }
            }
        }
        Self {
            num_states: ns,
            num_actions: na,
            horizon,
            cells,
        }
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

    pub fn cell(&self, s: usize, a: usize, h: usize) -> &FlatConfidenceCell {
        &self.cells[((h - 1) * self.num_states + s) * self.num_actions + a]
    }
}

/// Per-cell confidence `delta'` for a run of `episodes` episodes.
pub fn per_cell_delta(delta: f64, states: usize, options: usize, horizon: usize, episodes: usize) -> Result<f64> {
    split_confidence(delta, states, options, horizon, episodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_chain_env, Decision};
    use crate::model::fixed_duration_options;

    #[test]
    fn unrestricted_space() {
        let sp = OutcomeSpace::unrestricted(3, 2, 5);
        assert_eq!(sp.stages(1, 2), &[3, 4, 5]);
        assert_eq!(sp.len(1, 2), 9);
        assert_eq!(sp.reward_cap(0, 2), 3.0);
        assert_eq!(sp.outcomes(0, 4).collect::<Vec<_>>(), vec![
            JointOutcome::new(0, 5),
            JointOutcome::new(1, 5),
            JointOutcome::new(2, 5)
        ]);
    }

    #[test]
    fn fixed_duration_space() {
        let env = make_chain_env(4, 11, 0.1).unwrap();
        let opts = fixed_duration_options(&env.mdp, 3).unwrap();
        let sp = OutcomeSpace::from_options(&opts, 4, 11);
        assert_eq!(sp.stages(0, 1), &[4]);
        assert_eq!(sp.stages(0, 7), &[10]);
        assert_eq!(sp.stages(0, 10), &[11]);
        assert_eq!(sp.reward_cap(0, 1), 3.0);
        assert_eq!(sp.reward_cap(0, 10), 1.0);
    }

    #[test]
    fn unvisited_cells_are_uniform() {
        let stats = SufficientStats::new(2, 1, 4);
        let sp = OutcomeSpace::unrestricted(2, 1, 4);
        let m = empirical_model(&stats, &sp, |_, _, _| true).unwrap();
        let c = m.cell(0, 0, 1).unwrap();
        assert_eq!(c.kernel.len(), 6);
        assert!(c.kernel.iter().all(|&(_, p)| p == 1.0 / 6.0));
        let conf = ConfidenceModel::build(&stats, &sp, |_, _, _| true, 0.01, 2).unwrap();
        let cc = conf.cell(1, 0, 2).unwrap();
        assert_eq!(cc.beta_p, 2.0);
        assert_eq!(cc.beta_r, 3.0);
        assert!(cc.p_hat.is_empty());
    }

    #[test]
    fn visited_cell_estimates() {
        let mut stats = SufficientStats::new(2, 1, 4);
        for (s2, h2, r) in [(1, 2, 1.0), (1, 3, 2.0), (1, 2, 0.0)] {
            stats
                .update(&Decision {
                    state: 0,
                    option: 0,
                    stage: 1,
                    next_state: s2,
                    next_stage: h2,
                    reward: r,
                    duration: h2 - 1,
                })
                .unwrap();
        }
        let sp = OutcomeSpace::unrestricted(2, 1, 4);
        let m = empirical_model(&stats, &sp, |_, _, _| true).unwrap();
        let c = m.cell(0, 0, 1).unwrap();
        assert_eq!(c.reward, 1.0);
        assert_eq!(c.kernel, vec![(JointOutcome::new(1, 2), 2.0 / 3.0), (JointOutcome::new(1, 3), 1.0 / 3.0)]);
        let wrong = OutcomeSpace::unrestricted(3, 1, 4);
        assert!(empirical_model(&stats, &wrong, |_, _, _| true).is_err());
    }
}
