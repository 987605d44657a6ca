use crate::estimation::SufficientStats;
use crate::model::FhSmdp;

/// Holding-time statistics of an option set.
///
/// Aggregates use only cells the horizon does not cut, i.e. cells whose
/// kernel puts no mass on stage `H`; if every cell is cut, all are used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptionStatsSummary {
    /// `max sqrt(E[tau^2])` over cells.
    pub t_bar: f64,
    /// Mean of `E[tau]` over cells.
    pub tau_mean: f64,
    /// Shortest and longest holding time with positive probability.
    pub tau_min: f64,
    pub tau_max: f64,
    /// Smallest per-cell `E[tau]`.
    pub tau_expect_min: f64,
    /// `H / tau_mean`.
    pub d_expected: f64,
    pub cells: usize,
}

struct Moments {
    mean: f64,
    second: f64,
    min: usize,
    max: usize,
}

fn summarize(horizon: usize, cells: impl Iterator<Item = (Moments, bool)>) -> OptionStatsSummary {
    let all: Vec<(Moments, bool)> = cells.collect();
    let uncut = all.iter().filter(|(_, cut)| !cut).count();
    let used: Vec<&Moments> = all.iter().filter(|(_, cut)| uncut == 0 || !cut).map(|(m, _)| m).collect();
    if used.is_empty() {
        return OptionStatsSummary {
            t_bar: 0.0,
            tau_mean: 0.0,
            tau_min: 0.0,
            tau_max: 0.0,
            tau_expect_min: 0.0,
            d_expected: 0.0,
            cells: 0,
        };
    }
    let n = used.len() as f64;
    let tau_mean = used.iter().map(|m| m.mean).sum::<f64>() / n;
    OptionStatsSummary {
        t_bar: used.iter().map(|m| m.second.sqrt()).fold(0.0, f64::max),
        tau_mean,
        tau_min: used.iter().map(|m| m.min).min().unwrap_or(0) as f64,
        tau_max: used.iter().map(|m| m.max).max().unwrap_or(0) as f64,
        tau_expect_min: used.iter().map(|m| m.mean).fold(f64::INFINITY, f64::min),
        d_expected: horizon as f64 / tau_mean,
        cells: used.len(),
    }
}

/// Exact holding-time statistics from an SMDP's joint kernels.
pub fn option_stats(smdp: &FhSmdp) -> OptionStatsSummary {
    option_stats_where(smdp, |_, _, _| true)
}

/// [`option_stats`] restricted to cells for which `keep(s, o, h)` holds.
pub fn option_stats_where(smdp: &FhSmdp, keep: impl Fn(usize, usize, usize) -> bool) -> OptionStatsSummary {
    let horizon = smdp.horizon();
    let mut cells = Vec::new();
    for h in 1..horizon {
        for s in 0..smdp.num_states() {
            for o in 0..smdp.num_options() {
                let Some(cell) = smdp.cell(s, o, h) else { continue };
                if !keep(s, o, h) {
                    continue;
                }
                let mut m = Moments {
                    mean: 0.0,
                    second: 0.0,
                    min: usize::MAX,
                    max: 0,
                };
                let mut cut = false;
                for &(w, p) in &cell.kernel {
                    let tau = w.stage - h;
                    m.mean += p * tau as f64;
                    m.second += p * (tau * tau) as f64;
                    if p > 0.0 {
                        m.min = m.min.min(tau);
                        m.max = m.max.max(tau);
                        cut |= w.stage == horizon;
                    }
                }
                cells.push((m, cut));
            }
        }
    }
    summarize(horizon, cells.into_iter())
}

/// Empirical holding-time statistics from observed counts.
pub fn option_stats_from_counts(stats: &SufficientStats) -> OptionStatsSummary {
    let horizon = stats.horizon();
    let mut cells = Vec::new();
    for h in 1..horizon {
        for s in 0..stats.num_states() {
            for o in 0..stats.num_options() {
                let c = stats.cell(s, o, h);
                if c.visits == 0 {
                    continue;
                }
                let n = c.visits as f64;
                let mut m = Moments {
                    mean: 0.0,
                    second: 0.0,
                    min: usize::MAX,
                    max: 0,
                };
                let mut cut = false;
                for oc in &c.outcomes {
                    let tau = oc.stage - h;
                    let p = oc.count as f64 / n;
                    m.mean += p * tau as f64;
                    m.second += p * (tau * tau) as f64;
                    m.min = m.min.min(tau);
                    m.max = m.max.max(tau);
                    cut |= oc.stage == horizon;
                }
                cells.push((m, cut));
            }
        }
    }
    summarize(horizon, cells.into_iter())
}
