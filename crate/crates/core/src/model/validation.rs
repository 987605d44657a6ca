use std::fmt;

/// One violated invariant, named by the cell it was found at.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RowSum {
        state: usize,
        action: usize,
        stage: usize,
        sum: f64,
    },
    NegativeProbability {
        state: usize,
        action: usize,
        stage: usize,
        next: usize,
        prob: f64,
    },
    TargetOutOfRange {
        state: usize,
        action: usize,
        stage: usize,
        next: usize,
    },
    RewardOutOfRange {
        state: usize,
        action: usize,
        stage: usize,
        mean: f64,
    },
    TerminationOutOfRange {
        option: usize,
        state: usize,
        stage: usize,
        prob: f64,
    },
    BoundaryTermination {
        option: usize,
        state: usize,
        prob: f64,
    },
    Inadmissible {
        option: usize,
        state: usize,
        stage: usize,
    },
    InternalPolicyUndefined {
        option: usize,
        state: usize,
        stage: usize,
    },
    InternalActionOutOfRange {
        option: usize,
        state: usize,
        stage: usize,
        action: usize,
    },
    OptionShape {
        option: usize,
        detail: String,
    },
    KernelRowSum {
        state: usize,
        option: usize,
        stage: usize,
        sum: f64,
    },
    KernelStage {
        state: usize,
        option: usize,
        stage: usize,
        next_stage: usize,
    },
    SmdpRewardOutOfRange {
        state: usize,
        option: usize,
        stage: usize,
        reward: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { state, action, stage, sum } => write!(
                f,
                "transition row (s={state}, a={action}, h={stage}) sums to {sum} (deficit {})",
                1.0 - sum
            ),
            Violation::NegativeProbability { state, action, stage, next, prob } => write!(
                f,
                "transition row (s={state}, a={action}, h={stage}) has negative mass {prob} on s'={next}"
            ),
            Violation::TargetOutOfRange { state, action, stage, next } => write!(
                f,
                "transition row (s={state}, a={action}, h={stage}) targets unknown state {next}"
            ),
            Violation::RewardOutOfRange { state, action, stage, mean } => write!(
                f,
                "reward out of [0,1] at (s={state}, a={action}, h={stage}): {mean}"
            ),
            Violation::TerminationOutOfRange { option, state, stage, prob } => write!(
                f,
                "option {option}: termination probability {prob} out of [0,1] at (s={state}, h={stage})"
            ),
            Violation::BoundaryTermination { option, state, prob } => write!(
                f,
                "option {option}: termination at the final stage must be 1, found {prob} at s={state}"
            ),
            Violation::Inadmissible { option, state, stage } => write!(
                f,
                "admissibility: option {option} may terminate at (s={state}, h={stage}) where no option can be initiated"
            ),
            Violation::InternalPolicyUndefined { option, state, stage } => write!(
                f,
                "option {option}: internal policy undefined at reachable (s={state}, h={stage})"
            ),
            Violation::InternalActionOutOfRange { option, state, stage, action } => write!(
                f,
                "option {option}: internal policy picks unknown action {action} at (s={state}, h={stage})"
            ),
            Violation::OptionShape { option, detail } => write!(f, "option {option}: {detail}"),
            Violation::KernelRowSum { state, option, stage, sum } => write!(
                f,
                "kernel row (s={state}, o={option}, h={stage}) sums to {sum}"
            ),
            Violation::KernelStage { state, option, stage, next_stage } => write!(
                f,
                "kernel row (s={state}, o={option}, h={stage}) puts mass on stage {next_stage}"
            ),
            Violation::SmdpRewardOutOfRange { state, option, stage, reward } => write!(
                f,
                "cumulative reward {reward} out of range at (s={state}, o={option}, h={stage})"
            ),
        }
    }
}

/// List of violated invariants; empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::InvalidModel(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}
