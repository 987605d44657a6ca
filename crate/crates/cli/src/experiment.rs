use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fhsmdp_core::agents::{AgentKind, RunConfig, RunLog};
use fhsmdp_core::analysis::{decile_means, option_stats, BoundInputs, BoundReport};
use fhsmdp_core::env::flatten_to_smdp;
use fhsmdp_core::model::primitive_options;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{hex, ExperimentConfig};
use crate::plot;

/// Settings that come from the command line rather than the config file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed_offset: u64,
    /// Worker threads; `None` means one per logical core.
    pub workers: Option<usize>,
    pub plot: bool,
    pub out: Option<PathBuf>,
}

/// Size and holding-time figures of a run's environment, as seen by its agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub states: usize,
    pub actions: usize,
    pub options: usize,
    pub horizon: usize,
    pub option_states: usize,
    pub option_actions: usize,
    pub option_horizon: usize,
    pub d: f64,
    pub t_bar: f64,
    pub tau_bar: f64,
}

impl Dims {
    pub fn of(run: &RunConfig) -> Result<Self> {
        let env = run.env.build()?;
        let options = match run.agent {
            AgentKind::FlatUcrl => primitive_options(&env.mdp),
            AgentKind::TwoPhase => env.options.clone(),
            AgentKind::SmdpUcrl => run.options.build(&env)?,
        };
        let stats = option_stats(&flatten_to_smdp(&env.mdp, &options)?);
        let (s, a, h) = (env.mdp.num_states(), env.mdp.num_actions(), env.mdp.horizon());
        let sub = |f: fn(&fhsmdp_core::env::Scaffold) -> usize, full| {
            env.scaffolds.iter().map(f).max().unwrap_or(full)
        };
        let two_phase = run.agent == AgentKind::TwoPhase;
        Ok(Self {
            states: s,
            actions: a,
            options: options.len(),
            horizon: h,
            option_states: if two_phase { sub(|x| x.states.len(), s) } else { s },
            option_actions: if two_phase { sub(|x| x.actions.len(), a) } else { a },
            option_horizon: if two_phase { sub(|x| x.horizon, h) } else { h },
            d: stats.d_expected,
            t_bar: stats.t_bar,
            tau_bar: stats.tau_mean,
        })
    }

    /// Sub-problem scale relative to the full problem.
    pub fn alpha(&self) -> f64 {
        (self.option_states as f64 / self.states as f64).min(1.0)
    }

    pub fn bound_inputs(&self, episodes: usize) -> BoundInputs {
        BoundInputs {
            states: self.states as f64,
            actions: self.actions as f64,
            options: self.options as f64,
            episodes: episodes as f64,
            horizon: self.horizon as f64,
            d: self.d,
            t_bar: self.t_bar,
            tau_bar: self.tau_bar,
            option_states: self.option_states as f64,
            option_actions: self.option_actions as f64,
            option_horizon: self.option_horizon as f64,
            alpha: self.alpha(),
        }
    }
}

/// Contents of `runs/<name>/run.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMeta {
    pub name: String,
    pub seeds: Vec<u64>,
    pub v_star: f64,
    pub bias: f64,
    pub dims: Dims,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct Outcome {
    pub out: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<CheckResult>,
    pub plot_error: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Manifest {
    tool: String,
    version: String,
    config_sha256: String,
    seed_offset: u64,
    seeds: Vec<u64>,
    files: Vec<FileHash>,
}

#[derive(Serialize)]
struct FileHash {
    path: String,
    sha256: String,
}

struct Batch {
    name: String,
    meta: RunMeta,
    logs: Vec<RunLog>,
}

pub fn run_experiment(path: &Path, opts: &RunOptions) -> Result<Outcome> {
    let mut config = ExperimentConfig::load(path)?;
    let hash = config.hash();
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    run_config(&config, &hash, opts)
}

/// Runs every `(run, seed)` pair and writes the artifacts. `hash` goes into
/// the manifest as the config's identity.
pub fn run_config(config: &ExperimentConfig, hash: &str, opts: &RunOptions) -> Result<Outcome> {
    let out = opts.out.clone().unwrap_or_else(|| config.out.clone());
    fs::create_dir_all(&out).with_context(|| format!("out: cannot create {}", out.display()))?;
    let probe = out.join(".fhsmdp-write-test");
    fs::write(&probe, b"").with_context(|| format!("out: {} is not writable", out.display()))?;
    fs::remove_file(&probe).ok();

    let seeds = config
        .seeds
        .iter()
        .map(|s| s.checked_add(opts.seed_offset).ok_or_else(|| anyhow!("--seed-offset: seed {s} overflows")))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(&String, &RunConfig, u64)> = config
        .runs
        .iter()
        .flat_map(|(name, run)| seeds.iter().map(move |&s| (name, run, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .context("--workers")?;
    let logs: Vec<RunLog> = pool.install(|| {
        jobs.par_iter()
            .map(|&(name, run, seed)| {
                let mut run = run.clone();
                run.seed = seed;
                run.run().with_context(|| format!("runs.{name}, seed {seed}"))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut logs = logs.into_iter();
    let mut batches = Vec::new();
    for (name, run) in &config.runs {
        let logs: Vec<RunLog> = logs.by_ref().take(seeds.len()).collect();
        if logs.iter().any(|l| l.len() != logs[0].len()) {
            bail!("runs.{name}: seeds logged different numbers of episodes");
        }
        let meta = RunMeta {
            name: name.clone(),
            seeds: seeds.clone(),
            v_star: logs[0].v_star,
            bias: logs[0].bias,
            dims: Dims::of(run).with_context(|| format!("runs.{name}"))?,
            config: run.clone(),
        };
        batches.push(Batch { name: name.clone(), meta, logs });
    }

    let mut files: BTreeMap<PathBuf, Vec<u8>> = BTreeMap::new();
    for b in &batches {
        let dir = PathBuf::from("runs").join(&b.name);
        for (log, seed) in b.logs.iter().zip(&seeds) {
            files.insert(dir.join(format!("seed-{seed}.csv")), log.to_csv_string()?.into_bytes());
        }
        files.insert(dir.join("run.toml"), toml::to_string(&b.meta)?.into_bytes());
    }
    files.insert("summary.csv".into(), summary_csv(&batches)?.into_bytes());
    files.insert("finals.csv".into(), finals_csv(&batches, &seeds)?.into_bytes());
    if config.bounds {
        let (csv, text) = bounds_tables(&batches)?;
        files.insert("bounds.csv".into(), csv.into_bytes());
        files.insert("bounds.txt".into(), text.into_bytes());
    }
    let checks = run_checks(config, &batches);
    if !checks.is_empty() {
        files.insert("checks.csv".into(), checks_csv(&checks)?.into_bytes());
    }

    for (rel, bytes) in &files {
        let target = out.join(rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).with_context(|| format!("out: cannot create {}", parent.display()))?;
        }
        fs::write(&target, bytes).with_context(|| format!("writing {}", target.display()))?;
    }

    let mut plot_error = None;
    if config.plot || opts.plot {
        let curves: Vec<plot::Curve> = batches
            .iter()
            .map(|b| plot::Curve {
                label: format!("{} ({})", b.name, b.meta.config.agent.as_str()),
                values: mean_std(&b.logs).into_iter().map(|(m, _)| m).collect(),
            })
            .collect();
        let shape = batches.iter().find(|b| b.meta.config.agent != AgentKind::FlatUcrl).map(|b| {
            let mean = mean_std(&b.logs);
            plot::shape_curve(&b.meta.dims, mean.len(), mean.last().map_or(0.0, |m| m.0))
        });
        if let Err(e) = plot::regret_svg(&out.join("regret.svg"), &curves, shape.flatten().as_ref()) {
            plot_error = Some(format!("{e:#}"));
        } else {
            files.insert("regret.svg".into(), fs::read(out.join("regret.svg"))?);
        }
    }

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: hash.into(),
        seed_offset: opts.seed_offset,
        seeds: seeds.clone(),
        files: files
            .iter()
            .map(|(p, bytes)| FileHash {
                path: slashed(p),
                sha256: hex(&Sha256::digest(bytes)),
            })
            .collect(),
    };
    fs::write(out.join("manifest.toml"), toml::to_string(&manifest)?)
        .with_context(|| format!("writing {}", out.join("manifest.toml").display()))?;

    let mut written: Vec<PathBuf> = files.keys().map(|p| out.join(p)).collect();
    written.push(out.join("manifest.toml"));
    Ok(Outcome {
        out,
        files: written,
        checks,
        plot_error,
    })
}

fn slashed(p: &Path) -> String {
    p.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Per-episode mean and sample standard deviation of cumulative regret.
pub(crate) fn mean_std(logs: &[RunLog]) -> Vec<(f64, f64)> {
    let curves: Vec<Vec<f64>> = logs.iter().map(|l| l.cumulative_regret()).collect();
    column_stats(&curves)
}

pub(crate) fn column_stats(curves: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = curves.len() as f64;
    let len = curves.first().map_or(0, |c| c.len());
    (0..len)
        .map(|k| {
            let mean = curves.iter().map(|c| c[k]).sum::<f64>() / n;
            let var = if curves.len() > 1 {
                curves.iter().map(|c| (c[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        })
        .collect()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn summary_csv(batches: &[Batch]) -> Result<String> {
    let rows = batches.iter().flat_map(|b| {
        let n = b.logs.len();
        mean_std(&b.logs).into_iter().enumerate().map(move |(i, (m, s))| {
            vec![b.name.clone(), b.logs[0].episodes[i].episode.to_string(), m.to_string(), s.to_string(), n.to_string()]
        })
    });
    csv_text(&["run", "episode", "mean_regret", "std_regret", "seeds"], rows)
}

fn finals_csv(batches: &[Batch], seeds: &[u64]) -> Result<String> {
    let rows = batches.iter().flat_map(|b| {
        b.logs.iter().zip(seeds).map(|(l, s)| {
            vec![
                b.name.clone(),
                s.to_string(),
                l.final_regret().to_string(),
                l.v_star.to_string(),
                l.bias.to_string(),
            ]
        })
    });
    csv_text(&["run", "seed", "final_regret", "v_star", "bias"], rows)
}

fn bounds_tables(batches: &[Batch]) -> Result<(String, String)> {
    let mut rows = Vec::new();
    let mut text = String::new();
    for b in batches {
        let report = BoundReport::compute(b.meta.dims.bound_inputs(b.meta.config.episodes))
            .with_context(|| format!("bounds for runs.{}", b.name))?;
        for line in report.to_csv().lines().skip(1) {
            let (k, v) = line.split_once(',').expect("quantity,value");
            rows.push(vec![b.name.clone(), k.to_string(), v.to_string()]);
        }
        writeln!(text, "[{}]\n{report}", b.name)?;
    }
    Ok((csv_text(&["run", "quantity", "value"], rows)?, text))
}

fn checks_csv(checks: &[CheckResult]) -> Result<String> {
    let rows = checks
        .iter()
        .map(|c| vec![c.name.clone(), if c.passed { "pass" } else { "fail" }.to_string(), c.detail.clone()]);
    csv_text(&["check", "result", "detail"], rows)
}

fn run_checks(config: &ExperimentConfig, batches: &[Batch]) -> Vec<CheckResult> {
    let find = |name: &str| batches.iter().find(|b| b.name == name).expect("validated run name");
    let mut out = Vec::new();
    for c in &config.checks.beats {
        let (better, worse) = (find(&c.better), find(&c.worse));
        let wins = better
            .logs
            .iter()
            .zip(&worse.logs)
            .filter(|(b, w)| b.final_regret() < w.final_regret())
            .count();
        let fraction = wins as f64 / better.logs.len() as f64;
        out.push(CheckResult {
            name: format!("{} beats {}", c.better, c.worse),
            passed: fraction >= c.min_fraction,
            detail: format!("{wins}/{} seeds, need {}", better.logs.len(), c.min_fraction),
        });
    }
    for name in &config.checks.sublinear {
        let b = find(name);
        let len = b.logs[0].len();
        let inc: Vec<f64> = (0..len)
            .map(|k| b.logs.iter().map(|l| l.episodes[k].regret_inc).sum::<f64>() / b.logs.len() as f64)
            .collect();
        let (passed, detail) = match decile_means(&inc) {
            Some((first, last)) => (last < first, format!("first tenth {first:.4}, last tenth {last:.4}")),
            None => (false, format!("{len} episodes is too few")),
        };
        out.push(CheckResult {
            name: format!("{name} sublinear"),
            passed,
            detail,
        });
    }
    out
}
