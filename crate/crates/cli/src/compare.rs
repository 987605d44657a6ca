use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fhsmdp_core::agents::{AgentKind, RunLog};
use fhsmdp_core::analysis::crossover_episodes;

use crate::experiment::{column_stats, RunMeta};

/// A run directory read back from disk.
#[derive(Debug)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub meta: RunMeta,
    /// Mean cumulative regret per episode over the stored seeds.
    pub mean: Vec<f64>,
}

pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let meta_path = dir.join("run.toml");
    let text = fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?;
    let meta: RunMeta = toml::from_str(&text).with_context(|| format!("in {}", meta_path.display()))?;
    let mut curves = Vec::new();
    for seed in &meta.seeds {
        let path = dir.join(format!("seed-{seed}.csv"));
        let file = fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        let records = RunLog::read_csv(file).with_context(|| format!("in {}", path.display()))?;
        curves.push(records.iter().map(|r| r.regret_cum).collect::<Vec<f64>>());
    }
    if curves.is_empty() || curves.iter().any(|c| c.len() != curves[0].len()) {
        bail!("{}: seed files are missing or of unequal length", dir.display());
    }
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        mean: column_stats(&curves).into_iter().map(|(m, _)| m).collect(),
        meta,
    })
}

/// One run measured against the baseline.
#[derive(Debug)]
pub struct Pairing {
    pub name: String,
    pub mean: Vec<f64>,
    /// `mean / baseline` per episode; 1 where both are zero.
    pub ratio: Vec<f64>,
    /// First episode at which the two curves swap order.
    pub crossover: Option<usize>,
    pub analytic_crossover: Option<f64>,
}

#[derive(Debug)]
pub struct Comparison {
    pub baseline: String,
    pub baseline_mean: Vec<f64>,
    pub others: Vec<Pairing>,
}

/// Compares every run against the first. Runs must share the environment
/// and the episode count.
pub fn compare_runs(dirs: &[PathBuf]) -> Result<Comparison> {
    if dirs.len() < 2 {
        bail!("compare needs at least two run directories");
    }
    let runs = dirs.iter().map(|d| load_run(d)).collect::<Result<Vec<_>>>()?;
    let base = &runs[0];
    let mut others = Vec::new();
    for r in &runs[1..] {
        if r.meta.config.env != base.meta.config.env || r.meta.dims.horizon != base.meta.dims.horizon {
            bail!(
                "incompatible runs: {} and {} use different environments",
                base.dir.display(),
                r.dir.display()
            );
        }
        if r.mean.len() != base.mean.len() {
            bail!(
                "incompatible runs: {} logs {} episodes, {} logs {}",
                base.dir.display(),
                base.mean.len(),
                r.dir.display(),
                r.mean.len()
            );
        }
        let ratio = r
            .mean
            .iter()
            .zip(&base.mean)
            .map(|(&x, &b)| if x == b { 1.0 } else { x / b })
            .collect();
        let hierarchical = [r, base].into_iter().find(|x| x.meta.config.agent != AgentKind::FlatUcrl);
        let analytic_crossover = hierarchical.and_then(|x| {
            let d = &x.meta.dims;
            crossover_episodes(d.horizon as f64, d.states as f64, d.actions as f64, d.alpha(), d.options as f64).ok()
        });
        others.push(Pairing {
            name: r.meta.name.clone(),
            crossover: first_crossing(&base.mean, &r.mean),
            mean: r.mean.clone(),
            ratio,
            analytic_crossover,
        });
    }
    Ok(Comparison {
        baseline: base.meta.name.clone(),
        baseline_mean: base.mean.clone(),
        others,
    })
}

fn first_crossing(a: &[f64], b: &[f64]) -> Option<usize> {
    let mut above = None;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        if y == x {
            continue;
        }
        if above.is_some_and(|was| was != (y > x)) {
            return Some(k + 1);
        }
        above = Some(y > x);
    }
    None
}

impl Comparison {
    /// `episode, <baseline>, <run>, ratio_<run>, ...`
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["episode".to_string(), self.baseline.clone()];
        for o in &self.others {
            header.push(o.name.clone());
            header.push(format!("ratio_{}", o.name));
        }
        w.write_record(&header)?;
        for k in 0..self.baseline_mean.len() {
            let mut row = vec![(k + 1).to_string(), self.baseline_mean[k].to_string()];
            for o in &self.others {
                row.push(o.mean[k].to_string());
                row.push(o.ratio[k].to_string());
            }
            w.write_record(&row)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "baseline {}: final regret {:.3}", self.baseline, self.baseline_mean.last().unwrap_or(&0.0))?;
        for o in &self.others {
            let crossing = o.crossover.map_or("none".to_string(), |k| format!("episode {k}"));
            let analytic = o.analytic_crossover.map_or("n/a".to_string(), |k| format!("{k:.4e}"));
            writeln!(
                f,
                "{}: final regret {:.3}, final ratio {:.4}, curves cross at {crossing}, analytic crossover K {analytic}",
                o.name,
                o.mean.last().unwrap_or(&0.0),
                o.ratio.last().unwrap_or(&1.0),
            )?;
        }
        Ok(())
    }
}
