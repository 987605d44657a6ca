use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// Regret bounds are shapes: constants and logarithmic factors are set to 1.

/// Option-dependent regret shape `sqrt(S O K d^2) (T_bar + sqrt(S) H)`.
pub fn option_regret_bound(states: f64, options: f64, episodes: f64, d: f64, t_bar: f64, horizon: f64) -> f64 {
    (states * options * episodes * d * d).sqrt() * (t_bar + states.sqrt() * horizon)
}

/// Regret shape for deterministic options of fixed duration `tau`:
/// `(H / tau) sqrt(S O K) (tau + sqrt(S) H)`.
pub fn fixed_duration_regret_bound(states: f64, options: f64, episodes: f64, tau: f64, horizon: f64) -> f64 {
    horizon / tau * (states * options * episodes).sqrt() * (tau + states.sqrt() * horizon)
}

/// Regret shape of the two-phase agent:
/// `K^(2/3) (H_o^5 S_o^2 A_o O)^(1/3) + (H^2 S / H_o) sqrt(O K)`.
pub fn two_phase_regret_bound(
    episodes: f64,
    option_horizon: f64,
    option_states: f64,
    option_actions: f64,
    options: f64,
    horizon: f64,
    states: f64,
) -> f64 {
    episodes.powf(2.0 / 3.0)
        * (option_horizon.powi(5) * option_states.powi(2) * option_actions * options).cbrt()
        + horizon * horizon * states / option_horizon * (options * episodes).sqrt()
}

/// Flat baseline shape `H^2 S sqrt(A K)`.
pub fn flat_regret_bound(states: f64, actions: f64, episodes: f64, horizon: f64) -> f64 {
    horizon * horizon * states * (actions * episodes).sqrt()
}

/// Ratio of the two-phase shape's leading term to the flat shape.
#[allow(clippy::too_many_arguments)]
pub fn regret_ratio(
    episodes: f64,
    option_horizon: f64,
    option_states: f64,
    option_actions: f64,
    options: f64,
    horizon: f64,
    states: f64,
    actions: f64,
) -> f64 {
    episodes.powf(2.0 / 3.0) * (option_horizon.powi(5) * option_states.powi(2) * option_actions * options).cbrt()
        / flat_regret_bound(states, actions, episodes, horizon)
}

/// [`regret_ratio`] with sub-problems scaled by `alpha`
/// (`A_o = alpha A`, `S_o = alpha S`, `H_o = alpha H`):
/// `K^(1/6) alpha^(8/3) O^(1/3) / ((H S)^(1/3) A^(1/6))`.
pub fn regret_ratio_alpha(episodes: f64, horizon: f64, states: f64, actions: f64, alpha: f64, options: f64) -> f64 {
    episodes.powf(1.0 / 6.0) * alpha.powf(8.0 / 3.0) * options.cbrt() / ((horizon * states).cbrt() * actions.powf(1.0 / 6.0))
}

/// Largest `K` with [`regret_ratio_alpha`] at most 1:
/// `H^2 S^2 A / (alpha^16 O^2)`.
pub fn crossover_episodes(horizon: f64, states: f64, actions: f64, alpha: f64, options: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(horizon * horizon * states * states * actions / (alpha.powi(16) * options * options))
}

/// High-probability bound on the number of decisions in one episode:
/// `sqrt(32 (tau_max - tau_min) H (ln 2 - ln delta) / m^3) + H / m` with
/// `m` the smallest expected holding time.
pub fn renewal_bound(tau_min: f64, tau_max: f64, tau_expect_min: f64, horizon: f64, delta: f64) -> Result<f64> {
    if !(1.0 <= tau_min && tau_min <= tau_expect_min && tau_expect_min <= tau_max) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= tau_min <= tau_expect_min <= tau_max, got {tau_min}, {tau_expect_min}, {tau_max}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let m = tau_expect_min;
    let spread = 32.0 * (tau_max - tau_min) * horizon * (std::f64::consts::LN_2 - delta.ln()) / m.powi(3);
    Ok(spread.sqrt() + horizon / m)
}

/// Inputs of a [`BoundReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInputs {
    pub states: f64,
    pub actions: f64,
    pub options: f64,
    pub episodes: f64,
    pub horizon: f64,
    pub d: f64,
    pub t_bar: f64,
    pub tau_bar: f64,
    pub option_states: f64,
    pub option_actions: f64,
    pub option_horizon: f64,
    pub alpha: f64,
}

/// Every bound shape evaluated on one set of inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub option_bound: f64,
    pub fixed_duration_bound: f64,
    pub two_phase_bound: f64,
    pub flat_bound: f64,
    pub ratio: f64,
    pub crossover_k: f64,
}

impl BoundReport {
    pub fn compute(inputs: BoundInputs) -> Result<Self> {
        let i = &inputs;
        let fields = [
            i.states,
            i.actions,
            i.options,
            i.episodes,
            i.horizon,
            i.d,
            i.t_bar,
            i.tau_bar,
            i.option_states,
            i.option_actions,
            i.option_horizon,
        ];
        if fields.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("bound inputs must be positive and finite".into()));
        }
        Ok(Self {
            option_bound: option_regret_bound(i.states, i.options, i.episodes, i.d, i.t_bar, i.horizon),
            fixed_duration_bound: fixed_duration_regret_bound(i.states, i.options, i.episodes, i.tau_bar, i.horizon),
            two_phase_bound: two_phase_regret_bound(
                i.episodes,
                i.option_horizon,
                i.option_states,
                i.option_actions,
                i.options,
                i.horizon,
                i.states,
            ),
            flat_bound: flat_regret_bound(i.states, i.actions, i.episodes, i.horizon),
            ratio: regret_ratio(
                i.episodes,
                i.option_horizon,
                i.option_states,
                i.option_actions,
                i.options,
                i.horizon,
                i.states,
                i.actions,
            ),
            crossover_k: crossover_episodes(i.horizon, i.states, i.actions, i.alpha, i.options)?,
            inputs,
        })
    }

    fn rows(&self) -> Vec<(&'static str, f64)> {
        let i = &self.inputs;
        vec![
            ("states", i.states),
            ("actions", i.actions),
            ("options", i.options),
            ("episodes", i.episodes),
            ("horizon", i.horizon),
            ("d", i.d),
            ("t_bar", i.t_bar),
            ("tau_bar", i.tau_bar),
            ("option_states", i.option_states),
            ("option_actions", i.option_actions),
            ("option_horizon", i.option_horizon),
            ("alpha", i.alpha),
            ("option_bound", self.option_bound),
            ("fixed_duration_bound", self.fixed_duration_bound),
            ("two_phase_bound", self.two_phase_bound),
            ("flat_bound", self.flat_bound),
            ("ratio", self.ratio),
            ("crossover_k", self.crossover_k),
        ]
    }

    /// Two-column `quantity,value` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (k, v) in self.rows() {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.inputs;
        writeln!(f, "Regret bound shapes (unit constants, log factors dropped; shape, not certified constant)")?;
        writeln!(
            f,
            "inputs: S={} A={} O={} K={} H={} d={} T_bar={} tau_bar={} S_o={} A_o={} H_o={} alpha={}",
            i.states,
            i.actions,
            i.options,
            i.episodes,
            i.horizon,
            i.d,
            i.t_bar,
            i.tau_bar,
            i.option_states,
            i.option_actions,
            i.option_horizon,
            i.alpha
        )?;
        writeln!(f, "  options, general        {:>14.6e}", self.option_bound)?;
        writeln!(f, "  options, fixed duration {:>14.6e}", self.fixed_duration_bound)?;
        writeln!(f, "  two-phase               {:>14.6e}", self.two_phase_bound)?;
        writeln!(f, "  flat baseline           {:>14.6e}", self.flat_bound)?;
        writeln!(f, "  two-phase / flat ratio  {:>14.6e}", self.ratio)?;
        writeln!(f, "  crossover episodes      {:>14.6e}", self.crossover_k)
    }
}
