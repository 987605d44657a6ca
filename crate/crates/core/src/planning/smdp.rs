use super::optimistic::{optimistic_expectation, RowScratch};
use crate::estimation::ConfidenceModel;
use crate::model::{expectation, FhSmdp, HighLevelPolicy, JointOutcome, StageValueTable};

/// Q-values, values and greedy policy from a planning pass.
#[derive(Clone, Debug)]
pub struct OptimisticSolution {
    num_states: usize,
    num_options: usize,
    q: Vec<f64>,
    pub values: StageValueTable,
    pub policy: HighLevelPolicy,
}

impl OptimisticSolution {
    fn new(num_states: usize, num_options: usize, horizon: usize) -> Self {
        Self {
            num_states,
            num_options,
            q: vec![f64::NAN; num_states * num_options * horizon.saturating_sub(1)],
            values: StageValueTable::new(num_states, horizon),
            policy: HighLevelPolicy::undefined(num_states, horizon),
        }
    }

    /// `Q(s, o, h)`, or `None` when `o` is not initiable there.
    pub fn q(&self, s: usize, o: usize, h: usize) -> Option<f64> {
        let v = self.q[((h - 1) * self.num_states + s) * self.num_options + o];
        (!v.is_nan()).then_some(v)
    }

    pub fn value(&self, s: usize, h: usize) -> f64 {
        self.values.value(s, h)
    }
}

/// Optimal values and policy of a known SMDP by backward induction. Ties
/// go to the lowest option id.
pub fn exact_backward_induction(smdp: &FhSmdp) -> OptimisticSolution {
    let (ns, no, horizon) = (smdp.num_states(), smdp.num_options(), smdp.horizon());
    let mut sol = OptimisticSolution::new(ns, no, horizon);
    for h in (1..horizon).rev() {
        for s in 0..ns {
            let mut best: Option<(usize, f64)> = None;
            for o in 0..no {
                let Some(cell) = smdp.cell(s, o, h) else { continue };
                let q = cell.reward + expectation(&cell.kernel, |w| sol.values.at(w));
                sol.q[((h - 1) * ns + s) * no + o] = q;
                if best.is_none_or(|(_, b)| q > b) {
                    best = Some((o, q));
                }
            }
            if let Some((o, v)) = best {
                sol.values.set(s, h, v);
                sol.policy.set(s, h, Some(o));
            }
        }
    }
    sol
}

/// Extended value iteration: the optimistic values and greedy policy over
/// every SMDP in the confidence set.
///
/// Rewards are raised by their bonus and clipped to the cell's reward
/// cap; transitions move L1 mass onto the best feasible outcome. Values
/// are clipped to `H - h + 1`. Ties go to the lowest option id, and the
/// best outcome is the lowest `(stage, state)` among equal values.
pub fn extended_value_iteration(conf: &ConfidenceModel) -> OptimisticSolution {
    let (ns, no, horizon) = (conf.num_states(), conf.num_options(), conf.horizon());
    let space = conf.space();
    let mut sol = OptimisticSolution::new(ns, no, horizon);
    // stage_best[h'] = best state at stage h' and its value.
    let mut stage_best: Vec<Option<(usize, f64)>> = vec![None; horizon + 1];
    stage_best[horizon] = Some((0, 0.0));
    let mut scratch = RowScratch::default();
    for h in (1..horizon).rev() {
        let cap = (horizon - h + 1) as f64;
        for s in 0..ns {
            let mut best: Option<(usize, f64)> = None;
            for o in 0..no {
                let Some(cell) = conf.cell(s, o, h) else { continue };
                let mut target: Option<(JointOutcome, f64)> = None;
                for &st in space.stages(o, h) {
                    if let Some((bs, bv)) = stage_best[st] {
                        if target.is_none_or(|(_, v)| bv > v) {
                            target = Some((JointOutcome::new(bs, st), bv));
                        }
                    }
                }
                let Some((target, target_value)) = target else { continue };
                let reward = (cell.r_hat + cell.beta_r).min(cell.reward_cap);
                let cont = optimistic_expectation(
                    &cell.p_hat,
                    target,
                    target_value,
                    cell.beta_p,
                    |w| sol.values.at(w),
                    &mut scratch,
                );
                let q = reward + cont;
                sol.q[((h - 1) * ns + s) * no + o] = q;
                if best.is_none_or(|(_, b)| q > b) {
                    best = Some((o, q));
                }
            }
            if let Some((o, v)) = best {
                sol.values.set(s, h, v.min(cap));
                sol.policy.set(s, h, Some(o));
            }
        }
        stage_best[h] = best_state(sol.values.stage(h));
    }
    sol
}

/// Lowest-index maximizer of a stage's values, ignoring undefined entries.
pub(crate) fn best_state(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (s, &v) in values.iter().enumerate() {
        if !v.is_nan() && best.is_none_or(|(_, b)| v > b) {
            best = Some((s, v));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::OutcomeSpace;
    use crate::model::SmdpCell;

    fn two_state() -> FhSmdp {
        let mut m = FhSmdp::new(2, 2, 3).unwrap();
        for h in 1..3 {
            for s in 0..2 {
                m.set_cell(
                    s,
                    0,
                    h,
                    SmdpCell {
                        kernel: vec![(JointOutcome::new(0, h + 1), 1.0)],
                        reward: 0.2,
                    },
                )
                .unwrap();
                m.set_cell(
                    s,
                    1,
                    h,
                    SmdpCell {
                        kernel: vec![(JointOutcome::new(0, h + 1), 0.5), (JointOutcome::new(1, h + 1), 0.5)],
                        reward: 0.6,
                    },
                )
                .unwrap();
            }
        }
        m
    }

    #[test]
    fn hand_computed_values() {
        let sol = exact_backward_induction(&two_state());
        assert_eq!(sol.value(0, 2), 0.6);
        assert!((sol.value(0, 1) - 1.2).abs() < 1e-15);
        assert_eq!(sol.policy.get(1, 1), Some(1));
        assert_eq!(sol.q(0, 0, 1), Some(0.8));
    }

    #[test]
    fn zero_radius_matches_exact() {
        let m = two_state();
        let space = OutcomeSpace::unrestricted(2, 2, 3);
        let conf = ConfidenceModel::from_smdp(&m, &space, 0.0, 0.0).unwrap();
        let opt = extended_value_iteration(&conf);
        let exact = exact_backward_induction(&m);
        assert_eq!(opt.values, exact.values);
        assert_eq!(opt.policy, exact.policy);
    }

    #[test]
    fn values_clipped() {
        let m = two_state();
        let space = OutcomeSpace::unrestricted(2, 2, 3);
        let conf = ConfidenceModel::from_smdp(&m, &space, 10.0, 2.0).unwrap();
        let opt = extended_value_iteration(&conf);
        assert_eq!(opt.value(0, 1), 3.0);
        assert_eq!(opt.value(1, 2), 1.0);
    }
}
