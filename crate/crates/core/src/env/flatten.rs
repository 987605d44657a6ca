use crate::model::{FhMdp, FhSmdp, JointOutcome, OptionSet, OptionSpec, SmdpCell};
use crate::{Error, Result};

/// Exact SMDP induced by running `options` on `model`.
///
/// For every initiable `(s, o, h)` the option's internal Markov chain is
/// pushed forward stage by stage: mass that terminates at `(s', h')` lands
/// in the kernel, mass still running at stage `H` is censored there, and
/// the accumulated expected primitive reward becomes `r(s, o, h)`.
pub fn flatten_to_smdp(model: &FhMdp, options: &OptionSet) -> Result<FhSmdp> {
    let mut report = model.validate();
    report.extend(options.validate(model));
    report.into_result()?;
    if options.is_empty() {
        return Err(Error::InvalidParameter("empty option set".into()));
    }

    let (ns, horizon) = (model.num_states(), model.horizon());
    let mut smdp = FhSmdp::new(ns, options.len(), horizon)?;
    let mut scratch = Scratch::new(ns);
    for (o, option) in options.options.iter().enumerate() {
        for h in 1..horizon {
            for s in 0..ns {
                if option.is_initiable(s, h) {
                    let cell = flatten_cell(model, option, s, h, &mut scratch)?;
                    smdp.set_cell(s, o, h, cell)?;
                }
            }
        }
    }
    Ok(smdp)
}

struct Scratch {
    next: Vec<f64>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(ns: usize) -> Self {
        Self {
            next: vec![0.0; ns],
            touched: Vec::new(),
        }
    }
}

fn flatten_cell(model: &FhMdp, option: &OptionSpec, s: usize, h: usize, scratch: &mut Scratch) -> Result<SmdpCell> {
    let horizon = model.horizon();
    let mut running: Vec<(usize, f64)> = vec![(s, 1.0)];
    let mut kernel = Vec::new();
    let mut reward = 0.0;
    let mut stage = h;
    while !running.is_empty() {
        for &(x, mass) in &running {
            let a = option
                .action(x, stage)
                .ok_or(Error::PolicyUndefined { state: x, stage })?;
            reward += mass * model.reward(x, a, stage);
            for &(y, p) in model.transition(x, a, stage) {
                if scratch.next[y] == 0.0 {
                    scratch.touched.push(y);
                }
                scratch.next[y] += mass * p;
            }
        }
        stage += 1;
        scratch.touched.sort_unstable();
        running.clear();
        for &y in &scratch.touched {
            let m = std::mem::take(&mut scratch.next[y]);
            if m == 0.0 {
                continue;
            }
            let beta = if stage == horizon { 1.0 } else { option.termination(y, stage) };
            let stop = m * beta;
            if stop > 0.0 {
                kernel.push((JointOutcome::new(y, stage), stop));
            }
            if beta < 1.0 {
                running.push((y, m * (1.0 - beta)));
            }
        }
        scratch.touched.clear();
    }
    Ok(SmdpCell { kernel, reward })
}
