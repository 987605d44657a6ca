use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fhsmdp_core::agents::RunConfig;
use fhsmdp_core::env::EnvSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A batch of runs over a shared seed list.
///
/// ```toml
/// seeds = [1, 2, 3]
/// out = "results/chain"
/// plot = true
///
/// [runs.options]
/// agent = "smdp-ucrl"
/// episodes = 2000
/// delta = 0.1
/// env = { kind = "chain", length = 8, horizon = 20, noise = 0.1 }
///
/// [runs.flat]
/// agent = "flat-ucrl"
/// episodes = 2000
/// delta = 0.1
/// env = { kind = "chain", length = 8, horizon = 20, noise = 0.1 }
///
/// [[checks.beats]]
/// better = "options"
/// worse = "flat"
/// min_fraction = 0.8
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub plot: bool,
    #[serde(default = "yes")]
    pub bounds: bool,
    pub runs: BTreeMap<String, RunConfig>,
    #[serde(default)]
    pub checks: Checks,
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default)]
    pub beats: Vec<BeatsCheck>,
    /// Runs whose per-episode regret must shrink: mean increment over the
    /// last tenth below that over the first tenth.
    #[serde(default)]
    pub sublinear: Vec<String>,
}

/// `better` ends with less cumulative regret than `worse` in at least
/// `min_fraction` of the seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeatsCheck {
    pub better: String,
    pub worse: String,
    pub min_fraction: f64,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).context("config")?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file. Relative model-file paths are taken relative
    /// to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("seeds: at least one seed is required");
        }
        let mut seen = BTreeSet::new();
        for s in &self.seeds {
            if !seen.insert(s) {
                bail!("seeds: {s} is listed twice");
            }
        }
        if self.runs.is_empty() {
            bail!("runs: at least one run is required");
        }
        for (name, run) in &self.runs {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                bail!("runs.{name}: run names may only use letters, digits, '-' and '_'");
            }
            if run.seed != 0 {
                bail!("runs.{name}.seed: seeds are set by the top-level seeds list");
            }
            run.validate().with_context(|| format!("runs.{name}"))?;
        }
        let known = |field: &str, name: &str| -> Result<()> {
            if !self.runs.contains_key(name) {
                bail!("checks.{field}: no run named '{name}'");
            }
            Ok(())
        };
        for (i, b) in self.checks.beats.iter().enumerate() {
            known(&format!("beats[{i}].better"), &b.better)?;
            known(&format!("beats[{i}].worse"), &b.worse)?;
            if !(0.0..=1.0).contains(&b.min_fraction) {
                bail!("checks.beats[{i}].min_fraction: must lie in [0, 1], got {}", b.min_fraction);
            }
        }
        for (i, name) in self.checks.sublinear.iter().enumerate() {
            known(&format!("sublinear[{i}]"), name)?;
        }
        Ok(())
    }

    /// Rewrites relative model-file paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        for run in self.runs.values_mut() {
            if let EnvSpec::File { path } = &mut run.env {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
