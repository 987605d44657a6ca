use serde::{Deserialize, Serialize};

use crate::env::Decision;
use crate::model::JointOutcome;
use crate::{Error, Result};

/// Streaming count, sum and centered second moment of a reward stream.
///
/// The mean is `sum / count`, so it is exactly permutation-invariant
/// whenever the partial sums are exact (integer or dyadic rewards). The
/// second moment uses the one-pass update
/// `m2 += (x - mean_old) * (x - mean_new)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardMoments {
    pub count: u64,
    pub sum: f64,
    pub m2: f64,
}

impl RewardMoments {
    pub fn push(&mut self, x: f64) {
        let old_mean = self.mean();
        self.count += 1;
        self.sum += x;
        let new_mean = self.mean();
        self.m2 += (x - old_mean) * (x - new_mean);
        if self.m2 < 0.0 {
            self.m2 = 0.0;
        }
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Unbiased sample variance; 0 with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCount {
    pub state: usize,
    pub stage: usize,
    pub count: u64,
}

/// Sufficient statistics of one `(s, o, h)` cell.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub visits: u64,
    /// Joint outcome counts sorted by `(stage, state)`.
    pub outcomes: Vec<OutcomeCount>,
    pub reward: RewardMoments,
}

impl CellStats {
    fn record(&mut self, next: JointOutcome, reward: f64) {
        self.visits += 1;
        let key = |c: &OutcomeCount| (c.stage, c.state);
        match self.outcomes.binary_search_by_key(&(next.stage, next.state), key) {
            Ok(i) => self.outcomes[i].count += 1,
            Err(i) => self.outcomes.insert(
                i,
                OutcomeCount {
                    state: next.state,
                    stage: next.stage,
                    count: 1,
                },
            ),
        }
        self.reward.push(reward);
    }

    /// Empirical kernel `m / n`, sorted by outcome; empty when unvisited.
    pub fn empirical_row(&self) -> Vec<(JointOutcome, f64)> {
        let n = self.visits as f64;
        self.outcomes
            .iter()
            .map(|c| (JointOutcome::new(c.state, c.stage), c.count as f64 / n))
            .collect()
    }
}

/// Per-`(s, o, h)` visit counts, joint `(s', h')` counts and reward moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    num_states: usize,
    num_options: usize,
    horizon: usize,
    cells: Vec<CellStats>,
}

impl SufficientStats {
    pub fn new(num_states: usize, num_options: usize, horizon: usize) -> Self {
        Self {
            num_states,
            num_options,
            horizon,
            cells: vec![CellStats::default(); num_states * num_options * horizon.saturating_sub(1)],
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

    fn index(&self, s: usize, o: usize, h: usize) -> usize {
        ((h - 1) * self.num_states + s) * self.num_options + o
    }

    pub fn cell(&self, s: usize, o: usize, h: usize) -> &CellStats {
        &self.cells[self.index(s, o, h)]
    }

    pub fn visits(&self, s: usize, o: usize, h: usize) -> u64 {
        self.cell(s, o, h).visits
    }

    /// Adds one decision sample.
    pub fn update(&mut self, d: &Decision) -> Result<()> {
        if d.next_stage <= d.stage {
            return Err(Error::NonIncreasingStage {
                stage: d.stage,
                next_stage: d.next_stage,
            });
        }
        if d.stage == 0
            || d.next_stage > self.horizon
            || d.state >= self.num_states
            || d.next_state >= self.num_states
            || d.option >= self.num_options
        {
            return Err(Error::ShapeMismatch(format!(
                "sample (s={}, o={}, h={}, s'={}, h'={}) outside S={}, O={}, H={}",
                d.state, d.option, d.stage, d.next_state, d.next_stage, self.num_states, self.num_options, self.horizon
            )));
        }
        let i = self.index(d.state, d.option, d.stage);
        self.cells[i].record(JointOutcome::new(d.next_state, d.next_stage), d.reward);
        Ok(())
    }

    pub fn total_visits(&self) -> u64 {
        self.cells.iter().map(|c| c.visits).sum()
    }
}

/// Flat counterpart: per-`(s, a, h)` visit counts, next-state counts and
/// reward moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatStats {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    visits: Vec<u64>,
    next: Vec<Vec<(usize, u64)>>,
    reward: Vec<RewardMoments>,
}

impl FlatStats {
    pub fn new(num_states: usize, num_actions: usize, horizon: usize) -> Self {
        let cells = num_states * num_actions * horizon.saturating_sub(1);
        Self {
            num_states,
            num_actions,
            horizon,
            visits: vec![0; cells],
            next: vec![Vec::new(); cells],
            reward: vec![RewardMoments::default(); cells],
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

    fn index(&self, s: usize, a: usize, h: usize) -> usize {
        ((h - 1) * self.num_states + s) * self.num_actions + a
    }

    pub fn update(&mut self, s: usize, a: usize, h: usize, next: usize, reward: f64) -> Result<()> {
        if h == 0 || h >= self.horizon || s >= self.num_states || a >= self.num_actions || next >= self.num_states {
            return Err(Error::ShapeMismatch(format!(
                "flat sample (s={s}, a={a}, h={h}, s'={next}) outside S={}, A={}, H={}",
                self.num_states, self.num_actions, self.horizon
            )));
        }
        let i = self.index(s, a, h);
        self.visits[i] += 1;
        let row = &mut self.next[i];
        match row.binary_search_by_key(&next, |&(y, _)| y) {
            Ok(j) => row[j].1 += 1,
            Err(j) => row.insert(j, (next, 1)),
        }
        self.reward[i].push(reward);
        Ok(())
    }

    pub fn visits(&self, s: usize, a: usize, h: usize) -> u64 {
        self.visits[self.index(s, a, h)]
    }

    pub fn reward_moments(&self, s: usize, a: usize, h: usize) -> &RewardMoments {
        &self.reward[self.index(s, a, h)]
    }

    /// Empirical next-state distribution, empty when unvisited.
    pub fn empirical_row(&self, s: usize, a: usize, h: usize) -> Vec<(usize, f64)> {
        let i = self.index(s, a, h);
        let n = self.visits[i] as f64;
        self.next[i].iter().map(|&(y, c)| (y, c as f64 / n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(s: usize, o: usize, h: usize, s2: usize, h2: usize, r: f64) -> Decision {
        Decision {
            state: s,
            option: o,
            stage: h,
            next_state: s2,
            next_stage: h2,
            reward: r,
            duration: h2.saturating_sub(h),
        }
    }

    #[test]
    fn first_sample() {
        let mut m = RewardMoments::default();
        m.push(0.5);
        assert_eq!(m.mean(), 0.5);
        assert_eq!(m.variance(), 0.0);
    }

    #[test]
    fn two_point_variance() {
        let mut m = RewardMoments::default();
        m.push(0.0);
        m.push(1.0);
        assert_eq!(m.variance(), 0.5);
    }

    #[test]
    fn backwards_sample_rejected() {
        let mut st = SufficientStats::new(2, 1, 5);
        assert!(matches!(
            st.update(&sample(0, 0, 3, 1, 3, 0.0)),
            Err(Error::NonIncreasingStage { stage: 3, next_stage: 3 })
        ));
    }

    #[test]
    fn joint_counts_sum_to_visits() {
        let mut st = SufficientStats::new(3, 2, 6);
        let outs = [(1, 2), (2, 4), (1, 2), (0, 6), (2, 4)];
        for (s2, h2) in outs {
            st.update(&sample(0, 1, 1, s2, h2, 1.0)).unwrap();
        }
        let c = st.cell(0, 1, 1);
        assert_eq!(c.visits, 5);
        assert_eq!(c.outcomes.iter().map(|x| x.count).sum::<u64>(), 5);
        let row = c.empirical_row();
        assert_eq!(row[0], (JointOutcome::new(1, 2), 0.4));
        assert_eq!(row.len(), 3);
    }

    #[test]
    fn flat_counts() {
        let mut st = FlatStats::new(3, 2, 4);
        st.update(0, 1, 1, 2, 1.0).unwrap();
        st.update(0, 1, 1, 2, 0.0).unwrap();
        st.update(0, 1, 1, 0, 1.0).unwrap();
        assert_eq!(st.visits(0, 1, 1), 3);
        assert_eq!(st.empirical_row(0, 1, 1), vec![(0, 1.0 / 3.0), (2, 2.0 / 3.0)]);
        assert!(st.update(0, 1, 4, 0, 0.0).is_err());
    }
}
