use crate::agents::{Phase, RunLog};
use crate::env::flatten_to_smdp;
use crate::model::{FhMdp, OptionSet};
use crate::planning::{exact_backward_induction, flat_backward_induction};
use crate::{Error, Result};

/// Recomputes per-episode regret `v_star - v_policy` and its running sum.
/// Option-learning episodes keep their logged increments.
pub fn compute_regret(mut log: RunLog, v_star: f64) -> Result<RunLog> {
    for e in &mut log.episodes {
        if e.phase == Phase::Options {
            continue;
        }
        if e.v_policy.is_nan() {
            return Err(Error::Log(format!("episode {} has no policy evaluation", e.episode)));
        }
        e.regret_inc = v_star - e.v_policy;
    }
    log.v_star = v_star;
    let mut cum = 0.0;
    for e in &mut log.episodes {
        cum += e.regret_inc;
        e.regret_cum = cum;
    }
    Ok(log)
}

/// `V*(M)(start, 1) - V*(M_O)(start, 1)`: value the option set cannot reach.
pub fn bias_term(mdp: &FhMdp, options: &OptionSet, start: usize) -> Result<f64> {
    let flat = flat_backward_induction(mdp).value(start, 1);
    let smdp = flatten_to_smdp(mdp, options)?;
    let with_options = exact_backward_induction(&smdp).values.get(start, 1).ok_or(Error::NoAdmissibleOption {
        state: start,
        stage: 1,
    })?;
    Ok(flat - with_options)
}

/// Mean of the first and the last tenth of a sequence.
pub fn decile_means(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len() / 10;
    if n == 0 {
        return None;
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Some((mean(&values[..n]), mean(&values[values.len() - n..])))
}

/// Least-squares fit of `cum[k-1] = C k^p` on log-log axes over the
/// positive entries. Returns `(C, p)`.
pub fn fit_power_law(cumulative: &[f64]) -> Option<(f64, f64)> {
    let points: Vec<(f64, f64)> = cumulative
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0)
        .map(|(i, &y)| (((i + 1) as f64).ln(), y.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let p = sxy / sxx;
    Some(((my - p * mx).exp(), p))
}

/// Share of main-phase episodes whose decision count stays within a bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageReport {
    pub episodes: usize,
    pub within: usize,
    pub fraction: f64,
    pub passes: bool,
}

pub fn empirical_d_vs_bound(log: &RunLog, bound: f64, delta: f64) -> CoverageReport {
    let mut episodes = 0;
    let mut within = 0;
    for e in log.main_episodes() {
        episodes += 1;
        if (e.d_k as f64) <= bound {
            within += 1;
        }
    }
    let fraction = if episodes == 0 { 0.0 } else { within as f64 / episodes as f64 };
    CoverageReport {
        episodes,
        within,
        fraction,
        passes: episodes > 0 && fraction >= 1.0 - delta,
    }
}
