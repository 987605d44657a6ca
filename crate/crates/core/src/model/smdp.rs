use super::validation::{ValidationReport, Violation};
use crate::{Error, Result};

/// Joint `(s', h')` outcome of one option execution.
///
/// Ordered by stage first, then state; this is the canonical outcome order
/// used for tie-breaking and summation everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointOutcome {
    pub stage: usize,
    pub state: usize,
}

impl JointOutcome {
    pub fn new(state: usize, stage: usize) -> Self {
        Self { stage, state }
    }
}

/// Kernel row and mean cumulative reward of one `(s, o, h)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SmdpCell {
    /// Sorted by outcome, strictly positive probabilities.
    pub kernel: Vec<(JointOutcome, f64)>,
    pub reward: f64,
}

impl SmdpCell {
    /// Expected holding time `E[h' - h]` for a cell started at `stage`.
    pub fn mean_duration(&self, stage: usize) -> f64 {
        self.kernel.iter().map(|(w, p)| p * (w.stage - stage) as f64).sum()
    }
}

/// Finite-horizon semi-MDP. Cells exist for decision stages `1..H`; a
/// missing cell means the option cannot be initiated there.
#[derive(Clone, Debug, PartialEq)]
pub struct FhSmdp {
    num_states: usize,
    num_options: usize,
    horizon: usize,
    cells: Vec<Option<SmdpCell>>,
}

impl FhSmdp {
    pub fn new(num_states: usize, num_options: usize, horizon: usize) -> Result<Self> {
        if num_states == 0 || num_options == 0 || horizon < 1 {
            return Err(Error::InvalidParameter(format!(
                "SMDP dimensions must be positive (S={num_states}, O={num_options}, H={horizon})"
            )));
        }
        let cells = num_states * num_options * horizon.saturating_sub(1);
        Ok(Self {
            num_states,
            num_options,
            horizon,
            cells: vec![None; cells],
        })
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

    fn index(&self, s: usize, o: usize, h: usize) -> Option<usize> {
        (s < self.num_states && o < self.num_options && h >= 1 && h < self.horizon)
            .then(|| ((h - 1) * self.num_states + s) * self.num_options + o)
    }

    pub fn cell(&self, s: usize, o: usize, h: usize) -> Option<&SmdpCell> {
        self.index(s, o, h).and_then(|i| self.cells[i].as_ref())
    }

    /// Stores a cell. The kernel is sorted and merged; stages must be in
    /// range for the call to succeed, full validation is left to [`validate`].
    ///
    /// [`validate`]: FhSmdp::validate
    pub fn set_cell(&mut self, s: usize, o: usize, h: usize, mut cell: SmdpCell) -> Result<()> {
        let i = self.index(s, o, h).ok_or(Error::StageOutOfRange {
            stage: h,
            horizon: self.horizon,
        })?;
        cell.kernel.sort_by_key(|&(w, _)| w);
        let mut merged: Vec<(JointOutcome, f64)> = Vec::with_capacity(cell.kernel.len());
        for (w, p) in cell.kernel {
            match merged.last_mut() {
                Some(last) if last.0 == w => last.1 += p,
                _ => merged.push((w, p)),
            }
        }
        merged.retain(|&(_, p)| p != 0.0);
        cell.kernel = merged;
        self.cells[i] = Some(cell);
        Ok(())
    }

    pub fn clear_cell(&mut self, s: usize, o: usize, h: usize) {
        if let Some(i) = self.index(s, o, h) {
            self.cells[i] = None;
        }
    }

    /// Options defined at `(s, h)`, ascending.
    pub fn options_at(&self, s: usize, h: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_options).filter(move |&o| self.cell(s, o, h).is_some())
    }

    /// Row sums within `tol`, support restricted to `h < h' <= H`, rewards in
    /// `[0, H - h + 1]`.
    pub fn validate_with(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        for h in 1..self.horizon {
            for s in 0..self.num_states {
                for o in 0..self.num_options {
                    let Some(cell) = self.cell(s, o, h) else { continue };
                    let mut sum = 0.0;
                    for &(w, p) in &cell.kernel {
                        if w.stage <= h || w.stage > self.horizon || w.state >= self.num_states {
                            report.push(Violation::KernelStage {
                                state: s,
                                option: o,
                                stage: h,
                                next_stage: w.stage,
                            });
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > tol || cell.kernel.iter().any(|&(_, p)| p < 0.0) {
                        report.push(Violation::KernelRowSum {
                            state: s,
                            option: o,
                            stage: h,
                            sum,
                        });
                    }
                    let cap = (self.horizon - h + 1) as f64;
                    if !(0.0..=cap).contains(&cell.reward) {
                        report.push(Violation::SmdpRewardOutOfRange {
                            state: s,
                            option: o,
                            stage: h,
                            reward: cell.reward,
                        });
                    }
                }
            }
        }
        report
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(crate::model::ROW_SUM_TOL)
    }

    /// Same `(S, O, H)` shape.
    pub fn same_shape(&self, other: &FhSmdp) -> bool {
        self.num_states == other.num_states
            && self.num_options == other.num_options
            && self.horizon == other.horizon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_order_is_stage_major() {
        let a = JointOutcome::new(5, 2);
        let b = JointOutcome::new(0, 3);
        assert!(a < b);
        assert!(JointOutcome::new(1, 3) > b);
    }

    #[test]
    fn kernel_support_must_move_forward() {
        let mut m = FhSmdp::new(2, 1, 4).unwrap();
        m.set_cell(0, 0, 2, SmdpCell { kernel: vec![(JointOutcome::new(1, 2), 1.0)], reward: 0.0 })
            .unwrap();
        let report = m.validate();
        assert!(matches!(report.violations[0], Violation::KernelStage { next_stage: 2, .. }));
    }

    #[test]
    fn reward_cap_checked() {
        let mut m = FhSmdp::new(1, 1, 3).unwrap();
        m.set_cell(0, 0, 2, SmdpCell { kernel: vec![(JointOutcome::new(0, 3), 1.0)], reward: 2.5 })
            .unwrap();
        assert!(matches!(
            m.validate().violations[0],
            Violation::SmdpRewardOutOfRange { .. }
        ));
    }

    #[test]
    fn no_cells_at_final_stage() {
        let mut m = FhSmdp::new(1, 1, 3).unwrap();
        let cell = SmdpCell { kernel: vec![], reward: 0.0 };
        assert!(m.set_cell(0, 0, 3, cell).is_err());
        assert!(m.cell(0, 0, 3).is_none());
    }
}
