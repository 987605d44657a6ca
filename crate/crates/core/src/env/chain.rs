use super::Environment;
use crate::model::{FhMdp, OptionSet, OptionSpec, RewardNoise};
use crate::{Error, Result};

pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;

/// Directional chain: two actions, the intended move happens with
/// probability `1 - noise` and the opposite one otherwise (clamped at the
/// ends). Reward 1 for acting in the last cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainParams {
    pub length: usize,
    pub horizon: usize,
    pub noise: f64,
    pub reward_noise: RewardNoise,
    /// One `advance-k` option per stride: move right until a cell whose
    /// index is a multiple of `k` (or the last cell) is reached.
    pub strides: Vec<usize>,
}

impl ChainParams {
    pub fn new(length: usize, horizon: usize, noise: f64) -> Self {
        Self {
            length,
            horizon,
            noise,
            reward_noise: RewardNoise::Deterministic,
            strides: vec![1, 2, 3],
        }
    }
}

pub fn make_chain_env(length: usize, horizon: usize, noise: f64) -> Result<Environment> {
    build_chain(&ChainParams::new(length, horizon, noise))
}

pub fn build_chain(params: &ChainParams) -> Result<Environment> {
    let n = params.length;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("chain length must be >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&params.noise) {
        return Err(Error::InvalidParameter(format!("chain noise {} not in [0, 1]", params.noise)));
    }
    if params.strides.contains(&0) {
        return Err(Error::InvalidParameter("chain option strides must be positive".into()));
    }
    let noise = params.noise;
    let last = n - 1;
    let mdp = FhMdp::stationary(
        n,
        2,
        params.horizon,
        params.reward_noise,
        |s, a| {
            let left = s.saturating_sub(1);
            let right = (s + 1).min(last);
            let (intended, slip) = if a == RIGHT { (right, left) } else { (left, right) };
            vec![(intended, 1.0 - noise), (slip, noise)]
        },
        |s, _| if s == last { 1.0 } else { 0.0 },
    )?;

    let mut options = vec![OptionSpec::stationary("retreat", n, params.horizon, |_| true, |_| 1.0, |_| Some(LEFT))];
    for &k in &params.strides {
        options.push(OptionSpec::stationary(
            format!("advance-{k}"),
            n,
            params.horizon,
            |_| true,
            move |s| if s % k == 0 || s == last { 1.0 } else { 0.0 },
            |_| Some(RIGHT),
        ));
    }
    Ok(Environment {
        name: format!("chain-{n}"),
        mdp,
        options: OptionSet::new(options),
        start: 0,
        scaffolds: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::flatten_to_smdp;

    #[test]
    fn noiseless_chain_is_deterministic() {
        let env = make_chain_env(4, 8, 0.0).unwrap();
        for s in 0..4 {
            for a in 0..2 {
                let row = env.mdp.transition(s, a, 1);
                assert_eq!(row.len(), 1);
                assert_eq!(row[0].1, 1.0);
            }
        }
        assert!(env.mdp.validate().is_valid());
    }

    #[test]
    fn noisy_rows_sum_to_one() {
        let env = make_chain_env(6, 10, 0.1).unwrap();
        assert!(env.mdp.validate().is_valid());
        assert!(env.options.validate(&env.mdp).is_valid());
    }

    #[test]
    fn flattened_chain_validates() {
        let env = make_chain_env(5, 9, 0.2).unwrap();
        let smdp = flatten_to_smdp(&env.mdp, &env.options).unwrap();
        assert!(smdp.validate_with(1e-10).is_valid());
    }

    #[test]
    fn too_short_chain_rejected() {
        assert!(make_chain_env(1, 5, 0.0).is_err());
    }
}
