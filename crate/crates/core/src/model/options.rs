use super::mdp::FhMdp;
use super::validation::{ValidationReport, Violation};
use crate::{Error, Result};

/// A temporally extended action: initiation set, termination map and a
/// deterministic internal policy, all indexed by `(state, stage)`.
///
/// Termination is evaluated after each primitive step at the state and
/// stage just reached. `termination(s, H)` is forced to 1 by the
/// constructors; [`OptionSet::validate`] reports models that override it.
#[derive(Clone, Debug, PartialEq)]
pub struct OptionSpec {
    pub name: String,
    num_states: usize,
    horizon: usize,
    initiation: Vec<bool>,
    termination: Vec<f64>,
    policy: Vec<Option<usize>>,
}

impl OptionSpec {
    /// Option with an empty initiation set, no internal policy and
    /// termination only at the episode boundary.
    pub fn new(name: impl Into<String>, num_states: usize, horizon: usize) -> Self {
        let cells = num_states * horizon;
        let mut termination = vec![0.0; cells];
        for s in 0..num_states {
            termination[(horizon - 1) * num_states + s] = 1.0;
        }
        Self {
            name: name.into(),
            num_states,
            horizon,
            initiation: vec![false; cells],
            termination,
            policy: vec![None; cells],
        }
    }

    /// Stage-independent option. Termination at `H` is forced to 1.
    pub fn stationary(
        name: impl Into<String>,
        num_states: usize,
        horizon: usize,
        initiable: impl Fn(usize) -> bool,
        termination: impl Fn(usize) -> f64,
        policy: impl Fn(usize) -> Option<usize>,
    ) -> Self {
        let mut o = Self::new(name, num_states, horizon);
        for h in 1..=horizon {
            for s in 0..num_states {
                o.set_initiable(s, h, h < horizon && initiable(s));
                if h < horizon {
                    o.set_termination(s, h, termination(s));
                }
                o.set_action(s, h, policy(s));
            }
        }
        o
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn index(&self, s: usize, h: usize) -> usize {
        debug_assert!(s < self.num_states && h >= 1 && h <= self.horizon);
        (h - 1) * self.num_states + s
    }

    pub fn is_initiable(&self, s: usize, h: usize) -> bool {
        h >= 1 && h < self.horizon && self.initiation[self.index(s, h)]
    }

    pub fn termination(&self, s: usize, h: usize) -> f64 {
        self.termination[self.index(s, h)]
    }

    pub fn action(&self, s: usize, h: usize) -> Option<usize> {
        self.policy[self.index(s, h)]
    }

    pub fn set_initiable(&mut self, s: usize, h: usize, initiable: bool) {
        let i = self.index(s, h);
        self.initiation[i] = initiable;
    }

    pub fn set_termination(&mut self, s: usize, h: usize, prob: f64) {
        let i = self.index(s, h);
        self.termination[i] = prob;
    }

    pub fn set_action(&mut self, s: usize, h: usize, action: Option<usize>) {
        let i = self.index(s, h);
        self.policy[i] = action;
    }

    /// Stages at which this option, started at stage `h`, can possibly hand
    /// control back. Derived from the termination map alone: stage `h'` is
    /// feasible if some state terminates there with positive probability and
    /// every stage strictly between `h` and `h'` lets some state continue.
    pub fn feasible_stages(&self, h: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for next in (h + 1)..=self.horizon {
            if next == self.horizon {
                out.push(next);
                break;
            }
            let row = &self.termination[(next - 1) * self.num_states..next * self.num_states];
            if row.iter().any(|&b| b > 0.0) {
                out.push(next);
            }
            if !row.iter().any(|&b| b < 1.0) {
                break;
            }
        }
        out
    }
}

/// Ordered option library; an option's id is its position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptionSet {
    pub options: Vec<OptionSpec>,
}

impl OptionSet {
    pub fn new(options: Vec<OptionSpec>) -> Self {
        Self { options }
    }

    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.options.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&OptionSpec> {
        self.options.get(id)
    }

    /// Ids of the options that can be initiated at `(s, h)`, ascending.
    pub fn admissible(&self, s: usize, h: usize) -> Vec<usize> {
        self.options
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_initiable(s, h))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn any_admissible(&self, s: usize, h: usize) -> bool {
        self.options.iter().any(|o| o.is_initiable(s, h))
    }

    /// Checks the option invariants against `model`: termination range,
    /// forced termination at the horizon, admissibility of every possible
    /// termination point, and internal-policy coverage of every `(s, h)`
    /// an option can visit.
    pub fn validate(&self, model: &FhMdp) -> ValidationReport {
        let mut report = ValidationReport::default();
        let (ns, horizon) = (model.num_states(), model.horizon());
        for (id, o) in self.options.iter().enumerate() {
            if o.num_states != ns || o.horizon != horizon {
                report.push(Violation::OptionShape {
                    option: id,
                    detail: format!(
                        "defined over S={}, H={} but the model has S={ns}, H={horizon}",
                        o.num_states, o.horizon
                    ),
                });
                continue;
            }
            for h in 1..=horizon {
                for s in 0..ns {
                    let b = o.termination(s, h);
                    if !(0.0..=1.0).contains(&b) {
                        report.push(Violation::TerminationOutOfRange {
                            option: id,
                            state: s,
                            stage: h,
                            prob: b,
                        });
                    }
                    if h == horizon && b != 1.0 {
                        report.push(Violation::BoundaryTermination {
                            option: id,
                            state: s,
                            prob: b,
                        });
                    }
                    if h < horizon && b > 0.0 && !self.any_admissible(s, h) {
                        report.push(Violation::Inadmissible {
                            option: id,
                            state: s,
                            stage: h,
                        });
                    }
                }
            }
            check_internal_policy(id, o, model, &mut report);
        }
        report
    }

    /// Validation plus a check that the start state has an admissible option.
    pub fn validate_from(&self, model: &FhMdp, start: usize) -> ValidationReport {
        let mut report = self.validate(model);
        if model.horizon() > 1 && !self.any_admissible(start, 1) {
            report.push(Violation::Inadmissible {
                option: usize::MAX,
                state: start,
                stage: 1,
            });
        }
        report
    }
}

fn check_internal_policy(id: usize, o: &OptionSpec, model: &FhMdp, report: &mut ValidationReport) {
    let (ns, horizon) = (model.num_states(), model.horizon());
    let mut seen = vec![false; ns * horizon];
    let mut stack = Vec::new();
    for h in 1..horizon {
        for s in 0..ns {
            if o.is_initiable(s, h) {
                seen[(h - 1) * ns + s] = true;
                stack.push((s, h));
            }
        }
    }
    while let Some((s, h)) = stack.pop() {
        let a = match o.action(s, h) {
            Some(a) if a < model.num_actions() => a,
            Some(a) => {
                report.push(Violation::InternalActionOutOfRange {
                    option: id,
                    state: s,
                    stage: h,
                    action: a,
                });
                continue;
            }
            None => {
                report.push(Violation::InternalPolicyUndefined {
                    option: id,
                    state: s,
                    stage: h,
                });
                continue;
            }
        };
        let next_h = h + 1;
        if next_h >= horizon {
            continue;
        }
        for &(next, p) in model.transition(s, a, h) {
            if p <= 0.0 || next >= ns || o.termination(next, next_h) >= 1.0 {
                continue;
            }
            let i = (next_h - 1) * ns + next;
            if !seen[i] {
                seen[i] = true;
                stack.push((next, next_h));
            }
        }
    }
}

/// One single-step option per primitive action, initiable everywhere.
pub fn primitive_options(model: &FhMdp) -> OptionSet {
    let (ns, horizon) = (model.num_states(), model.horizon());
    OptionSet::new(
        (0..model.num_actions())
            .map(|a| {
                OptionSpec::stationary(format!("action-{a}"), ns, horizon, |_| true, |_| 1.0, |_| Some(a))
            })
            .collect(),
    )
}

/// One option per primitive action that repeats the action for exactly
/// `tau` steps. Decisions are only possible at stages `1, 1 + tau, ...`.
pub fn fixed_duration_options(model: &FhMdp, tau: usize) -> Result<OptionSet> {
    if tau == 0 {
        return Err(Error::InvalidParameter("fixed option duration must be >= 1".into()));
    }
    let (ns, horizon) = (model.num_states(), model.horizon());
    let boundary = |h: usize| (h - 1).is_multiple_of(tau);
    let options = (0..model.num_actions())
        .map(|a| {
            let mut o = OptionSpec::new(format!("repeat-{a}x{tau}"), ns, horizon);
            for h in 1..=horizon {
                for s in 0..ns {
                    o.set_action(s, h, Some(a));
                    if h < horizon {
                        o.set_initiable(s, h, boundary(h));
                        o.set_termination(s, h, if boundary(h) { 1.0 } else { 0.0 });
                    }
                }
            }
            o
        })
        .collect();
    Ok(OptionSet::new(options))
}
