use super::stats::SufficientStats;
use crate::{Error, Result};

/// L1 diameter of the probability simplex.
pub const MAX_L1_RADIUS: f64 = 2.0;

/// Empirical-Bernstein reward radius
/// `sqrt(2 var ln(2/d) / n) + 7 ln(2/d) / (3 (n - 1))`, or `fallback` when
/// fewer than two samples exist.
pub fn empirical_bernstein_radius(n: u64, variance: f64, delta_prime: f64, fallback: f64) -> f64 {
    if n <= 1 {
        return fallback;
    }
    let n = n as f64;
    let log_term = (2.0 / delta_prime).ln();
    (2.0 * variance * log_term / n).sqrt() + 7.0 * log_term / (3.0 * (n - 1.0))
}

/// Weissman L1 radius `sqrt(2 (k ln 2 + ln(n / d)) / n)`, capped at the
/// simplex diameter; the cap is returned outright when `n == 0`.
pub fn weissman_radius(n: u64, delta_prime: f64, support_size: usize) -> f64 {
    if n == 0 {
        return MAX_L1_RADIUS;
    }
    let n = n as f64;
    let r = (2.0 * (support_size as f64 * std::f64::consts::LN_2 + (n / delta_prime).ln()) / n).sqrt();
    r.min(MAX_L1_RADIUS)
}

/// Reward bonus of cell `(s, o, h)`. With at most one sample the trivial
/// bound `H - h + 1` is returned.
pub fn reward_bonus(stats: &SufficientStats, s: usize, o: usize, h: usize, delta_prime: f64) -> f64 {
    let cell = stats.cell(s, o, h);
    let fallback = (stats.horizon() - h + 1) as f64;
    empirical_bernstein_radius(cell.visits, cell.reward.variance(), delta_prime, fallback)
}

/// L1 transition radius of cell `(s, o, h)`.
pub fn transition_bonus(
    stats: &SufficientStats,
    s: usize,
    o: usize,
    h: usize,
    delta_prime: f64,
    support_size: usize,
) -> f64 {
    weissman_radius(stats.visits(s, o, h), delta_prime, support_size)
}

/// Union-bound split of `delta` over every `(s, o, h)` cell, both
/// confidence sets and all `episodes`: `delta / (2 S O H K)`.
pub fn split_confidence(delta: f64, states: usize, options: usize, horizon: usize, episodes: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let cells = 2.0 * states.max(1) as f64 * options.max(1) as f64 * horizon.max(1) as f64 * episodes.max(1) as f64;
    Ok(delta / cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_leaves_second_term() {
        let d: f64 = 0.01;
        let n = 500;
        let expected = 7.0 * (2.0 / d).ln() / (3.0 * (n as f64 - 1.0));
        assert_eq!(empirical_bernstein_radius(n, 0.0, d, 9.0), expected);
    }

    #[test]
    fn no_data_reward_fallback() {
        let stats = SufficientStats::new(2, 2, 6);
        assert_eq!(reward_bonus(&stats, 0, 1, 2, 0.05), 5.0);
    }

    #[test]
    fn worked_reward_radius() {
        // sqrt(2 ln 40 / 100) + 7 ln 40 / 297
        let r = empirical_bernstein_radius(100, 1.0, 0.05, 0.0);
        assert!((r - 0.358_56).abs() < 1e-4, "{r}");
    }

    #[test]
    fn worked_transition_radius() {
        let r = weissman_radius(100, 0.05, 4);
        assert!((r - 0.4555).abs() < 1e-4, "{r}");
        assert_eq!(weissman_radius(0, 0.05, 4), 2.0);
    }

    #[test]
    fn transition_radius_non_increasing() {
        for support in [1, 4, 30] {
            for d in [0.5, 0.05, 1e-6] {
                let mut prev = f64::INFINITY;
                for n in 3..2000 {
                    let r = weissman_radius(n, d, support);
                    assert!(r <= prev, "n={n} support={support} d={d}");
                    prev = r;
                }
            }
        }
    }

    #[test]
    fn confidence_split() {
        assert!((split_confidence(0.1, 2, 2, 5, 10).unwrap() - 2.5e-4).abs() < 1e-18);
        assert_eq!(split_confidence(0.3, 1, 1, 1, 1).unwrap(), 0.15);
        assert!(split_confidence(1.0, 1, 1, 1, 1).is_err());
        assert!(split_confidence(0.0, 1, 1, 1, 1).is_err());
    }
}
