//! Structured-text (TOML) file formats.
//!
//! Model file, schema `fhsmdp-model` version 1:
//!
//! ```toml
//! format = "fhsmdp-model"
//! version = 1
//! name = "chain-4"
//! states = 4
//! actions = 2
//! horizon = 8
//! start = 0
//! reward_noise = "deterministic"   # or "bernoulli"
//!
//! [[transition]]                   # sparse p(next | s, a, h)
//! s = 0
//! a = 1
//! h = 1
//! next = 1
//! p = 1.0
//!
//! [[reward]]                       # omitted entries have mean 0
//! s = 3
//! a = 0
//! h = 1
//! mean = 1.0
//!
//! [[option]]
//! name = "advance-2"
//! initiation = [[0, 1], [1, 1]]    # (s, h) pairs
//! termination = [{ s = 2, h = 2, p = 1.0 }]
//! policy = [{ s = 0, h = 1, a = 1 }]
//! ```
//!
//! Termination entries are listed only where they differ from the default
//! (0 before the horizon, 1 at the horizon). Writing a parsed file
//! reproduces it byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::model::{FhMdp, OptionSet, OptionSpec, RewardNoise};
use crate::{Error, Result};

pub const MODEL_FORMAT: &str = "fhsmdp-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(default)]
    name: String,
    states: usize,
    actions: usize,
    horizon: usize,
    #[serde(default)]
    start: usize,
    #[serde(default)]
    reward_noise: RewardNoise,
    #[serde(default)]
    transition: Vec<TransitionEntry>,
    #[serde(default)]
    reward: Vec<RewardEntry>,
    #[serde(default)]
    option: Vec<OptionEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    s: usize,
    a: usize,
    h: usize,
    next: usize,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RewardEntry {
    s: usize,
    a: usize,
    h: usize,
    mean: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionEntry {
    name: String,
    #[serde(default)]
    initiation: Vec<[usize; 2]>,
    #[serde(default)]
    termination: Vec<TerminationEntry>,
    #[serde(default)]
    policy: Vec<PolicyEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerminationEntry {
    s: usize,
    h: usize,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyEntry {
    s: usize,
    h: usize,
    a: usize,
}

/// Serializes the model, options and start state of `env`.
pub fn model_to_string(env: &Environment) -> Result<String> {
    let mdp = &env.mdp;
    let (ns, na, horizon) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let mut transition = Vec::new();
    let mut reward = Vec::new();
    for h in 1..=horizon {
        for s in 0..ns {
            for a in 0..na {
                for &(next, p) in mdp.transition(s, a, h) {
                    transition.push(TransitionEntry { s, a, h, next, p });
                }
                let mean = mdp.reward(s, a, h);
                if mean != 0.0 {
                    reward.push(RewardEntry { s, a, h, mean });
                }
            }
        }
    }
    let option = env
        .options
        .options
        .iter()
        .map(|o| {
            let mut entry = OptionEntry {
                name: o.name.clone(),
                initiation: Vec::new(),
                termination: Vec::new(),
                policy: Vec::new(),
            };
            for h in 1..=horizon {
                for s in 0..ns {
                    if o.is_initiable(s, h) {
                        entry.initiation.push([s, h]);
                    }
                    let p = o.termination(s, h);
                    let default = if h == horizon { 1.0 } else { 0.0 };
                    if p != default {
                        entry.termination.push(TerminationEntry { s, h, p });
                    }
                    if let Some(a) = o.action(s, h) {
                        entry.policy.push(PolicyEntry { s, h, a });
                    }
                }
            }
            entry
        })
        .collect();
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        name: env.name.clone(),
        states: ns,
        actions: na,
        horizon,
        start: env.start,
        reward_noise: mdp.reward_noise(),
        transition,
        reward,
        option,
    };
    toml::to_string(&file).map_err(|e| Error::Format(e.to_string()))
}

/// Parses a model document. Structural errors (unknown keys, indices out of
/// range) fail here; probabilistic invariants are left to validation.
pub fn model_from_str(text: &str) -> Result<Environment> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.format != MODEL_FORMAT {
        return Err(Error::Format(format!("unknown format '{}'", file.format)));
    }
    if file.version != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported model version {}", file.version)));
    }
    let (ns, na, horizon) = (file.states, file.actions, file.horizon);
    let check = |s: usize, a: Option<usize>, h: usize, what: &str| {
        if s >= ns || a.is_some_and(|a| a >= na) || h == 0 || h > horizon {
            Err(Error::Format(format!("{what} entry (s={s}, a={a:?}, h={h}) out of range")))
        } else {
            Ok(())
        }
    };
    let mut mdp = FhMdp::new(ns, na, horizon, file.reward_noise)?;
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ns * na * horizon];
    for t in &file.transition {
        check(t.s, Some(t.a), t.h, "transition")?;
        if t.next >= ns {
            return Err(Error::Format(format!("transition target {} out of range", t.next)));
        }
        rows[((t.h - 1) * ns + t.s) * na + t.a].push((t.next, t.p));
    }
    for h in 1..=horizon {
        for s in 0..ns {
            for a in 0..na {
                let row = std::mem::take(&mut rows[((h - 1) * ns + s) * na + a]);
                mdp.set_transition(s, a, h, row);
            }
        }
    }
    for r in &file.reward {
        check(r.s, Some(r.a), r.h, "reward")?;
        mdp.set_reward(r.s, r.a, r.h, r.mean);
    }
    let mut options = Vec::with_capacity(file.option.len());
    for entry in &file.option {
        let mut o = OptionSpec::new(entry.name.clone(), ns, horizon);
        for &[s, h] in &entry.initiation {
            check(s, None, h, "initiation")?;
            o.set_initiable(s, h, true);
        }
        for t in &entry.termination {
            check(t.s, None, t.h, "termination")?;
            o.set_termination(t.s, t.h, t.p);
        }
        for p in &entry.policy {
            check(p.s, Some(p.a), p.h, "policy")?;
            o.set_action(p.s, p.h, Some(p.a));
        }
        options.push(o);
    }
    if file.start >= ns {
        return Err(Error::Format(format!("start state {} out of range", file.start)));
    }
    Ok(Environment {
        name: file.name,
        mdp,
        options: OptionSet::new(options),
        start: file.start,
        scaffolds: Vec::new(),
    })
}

pub fn read_model_file(path: &Path) -> Result<Environment> {
    let text = std::fs::read_to_string(path)?;
    model_from_str(&text)
}

pub fn write_model_file(path: &Path, env: &Environment) -> Result<()> {
    std::fs::write(path, model_to_string(env)?)?;
    Ok(())
}

/// Any serde document as TOML text.
pub fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
