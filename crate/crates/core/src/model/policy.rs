use super::smdp::{FhSmdp, JointOutcome};
use crate::{Error, Result};

/// Deterministic high-level policy `(s, h) -> option`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighLevelPolicy {
    num_states: usize,
    horizon: usize,
    choice: Vec<Option<usize>>,
}

impl HighLevelPolicy {
    pub fn undefined(num_states: usize, horizon: usize) -> Self {
        Self {
            num_states,
            horizon,
            choice: vec![None; num_states * horizon],
        }
    }

    pub fn from_fn(num_states: usize, horizon: usize, f: impl Fn(usize, usize) -> Option<usize>) -> Self {
        let mut p = Self::undefined(num_states, horizon);
        for h in 1..horizon {
            for s in 0..num_states {
                p.set(s, h, f(s, h));
            }
        }
        p
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, s: usize, h: usize) -> Option<usize> {
        if h == 0 || h > self.horizon || s >= self.num_states {
            return None;
        }
        self.choice[(h - 1) * self.num_states + s]
    }

    pub fn set(&mut self, s: usize, h: usize, o: Option<usize>) {
        self.choice[(h - 1) * self.num_states + s] = o;
    }
}

/// Values `V(s, h)` for `h` in `1..=H`, with `V(., H) = 0`.
///
/// Entries the producing routine could not define (no option available,
/// policy undefined) hold NaN; [`StageValueTable::get`] maps those to `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageValueTable {
    num_states: usize,
    horizon: usize,
    values: Vec<f64>,
}

impl StageValueTable {
    /// All-undefined table with the terminal stage set to 0.
    pub fn new(num_states: usize, horizon: usize) -> Self {
        let mut values = vec![f64::NAN; num_states * horizon];
        for v in &mut values[(horizon - 1) * num_states..] {
            *v = 0.0;
        }
        Self {
            num_states,
            horizon,
            values,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Raw entry (NaN when undefined).
    pub fn value(&self, s: usize, h: usize) -> f64 {
        self.values[(h - 1) * self.num_states + s]
    }

    pub fn get(&self, s: usize, h: usize) -> Option<f64> {
        let v = self.value(s, h);
        (!v.is_nan()).then_some(v)
    }

    pub fn set(&mut self, s: usize, h: usize, v: f64) {
        self.values[(h - 1) * self.num_states + s] = v;
    }

    pub fn at(&self, w: JointOutcome) -> f64 {
        self.value(w.state, w.stage)
    }

    /// Values of one stage, indexed by state.
    pub fn stage(&self, h: usize) -> &[f64] {
        &self.values[(h - 1) * self.num_states..h * self.num_states]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// `sum_w p(w) V(w)` in kernel order. Every planner and evaluator uses this
/// so that equal inputs give bit-equal outputs.
#[inline]
pub fn expectation<K: Copy>(row: &[(K, f64)], value: impl Fn(K) -> f64) -> f64 {
    row.iter().fold(0.0, |acc, &(w, p)| acc + p * value(w))
}

/// Exact `V^mu` by backward recursion over `h = H-1, ..., 1`.
///
/// Cells where the policy is undefined stay undefined; it is an error for a
/// defined cell to reach one of them with positive probability.
pub fn policy_value(smdp: &FhSmdp, policy: &HighLevelPolicy) -> Result<StageValueTable> {
    let (ns, horizon) = (smdp.num_states(), smdp.horizon());
    if policy.num_states() != ns || policy.horizon() != horizon {
        return Err(Error::ShapeMismatch(format!(
            "policy over S={}, H={} vs SMDP over S={ns}, H={horizon}",
            policy.num_states(),
            policy.horizon()
        )));
    }
    let mut table = StageValueTable::new(ns, horizon);
    for h in (1..horizon).rev() {
        for s in 0..ns {
            let Some(o) = policy.get(s, h) else { continue };
            let cell = smdp.cell(s, o, h).ok_or(Error::NotInitiable {
                option: o,
                state: s,
                stage: h,
            })?;
            if let Some(&(w, _)) = cell.kernel.iter().find(|&&(w, p)| p > 0.0 && table.at(w).is_nan()) {
                return Err(Error::PolicyUndefined {
                    state: w.state,
                    stage: w.stage,
                });
            }
            let v = cell.reward + expectation(&cell.kernel, |w| table.at(w));
            table.set(s, h, v);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SmdpCell;

    fn unit_smdp(horizon: usize) -> FhSmdp {
        let mut m = FhSmdp::new(1, 1, horizon).unwrap();
        for h in 1..horizon {
            m.set_cell(0, 0, h, SmdpCell { kernel: vec![(JointOutcome::new(0, h + 1), 1.0)], reward: 1.0 })
                .unwrap();
        }
        m
    }

    #[test]
    fn unit_reward_single_state() {
        let m = unit_smdp(5);
        let pol = HighLevelPolicy::from_fn(1, 5, |_, _| Some(0));
        let v = policy_value(&m, &pol).unwrap();
        assert_eq!(v.value(0, 1), 4.0);
        assert_eq!(v.value(0, 5), 0.0);
    }

    #[test]
    fn zero_reward_gives_zero_values() {
        let mut m = FhSmdp::new(2, 2, 4).unwrap();
        for h in 1..4 {
            for s in 0..2 {
                for o in 0..2 {
                    let k = vec![(JointOutcome::new(1 - s, h + 1), 0.5), (JointOutcome::new(s, 4), 0.5)];
                    m.set_cell(s, o, h, SmdpCell { kernel: k, reward: 0.0 }).unwrap();
                }
            }
        }
        let pol = HighLevelPolicy::from_fn(2, 4, |s, _| Some(s));
        let v = policy_value(&m, &pol).unwrap();
        assert!(v.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn reaching_an_undefined_cell_is_an_error() {
        let m = unit_smdp(4);
        let mut pol = HighLevelPolicy::from_fn(1, 4, |_, _| Some(0));
        pol.set(0, 2, None);
        match policy_value(&m, &pol) {
            Err(Error::PolicyUndefined { state: 0, stage: 2 }) => {}
            other => panic!("expected PolicyUndefined, got {other:?}"),
        }
    }

    #[test]
    fn choosing_a_missing_option_is_an_error() {
        let m = unit_smdp(3);
        let pol = HighLevelPolicy::from_fn(1, 3, |_, _| Some(1));
        assert!(matches!(policy_value(&m, &pol), Err(Error::NotInitiable { option: 1, .. })));
    }
}
