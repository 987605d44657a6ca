use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::env::Decision;
use crate::{Error, Result};

/// Which part of a run an episode belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// Learning option policies on their sub-problems.
    Options,
    /// Acting in the full task.
    Main,
}

/// One logged episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    /// 1-based episode index.
    pub episode: usize,
    pub phase: Phase,
    pub decisions: Vec<Decision>,
    pub d_k: usize,
    pub ret: f64,
    /// Optimistic value of the start state under the planned policy.
    pub v_opt: f64,
    /// True value of the start state under the executed policy.
    pub v_policy: f64,
    pub regret_inc: f64,
    pub regret_cum: f64,
}

/// Per-episode history of one agent run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub agent: String,
    pub start: usize,
    pub horizon: usize,
    /// Reference value the main-phase regret is measured against.
    pub v_star: f64,
    /// Value lost to the option set, `V*(M) - V*(M_O)`.
    pub bias: f64,
    pub episodes: Vec<EpisodeRecord>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    episode: usize,
    phase: Phase,
    d_k: usize,
    #[serde(rename = "return")]
    ret: f64,
    v_opt: f64,
    v_policy: f64,
    regret_inc: f64,
    regret_cum: f64,
}

#[derive(Serialize)]
struct DecisionRow {
    episode: usize,
    state: usize,
    option: usize,
    stage: usize,
    next_state: usize,
    next_stage: usize,
    reward: f64,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.episodes.last().map_or(0.0, |e| e.regret_cum)
    }

    pub fn cumulative_regret(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.regret_cum).collect()
    }

    pub fn main_episodes(&self) -> impl Iterator<Item = &EpisodeRecord> {
        self.episodes.iter().filter(|e| e.phase == Phase::Main)
    }

    /// Recomputes `regret_cum` from the increments.
    pub(crate) fn accumulate(&mut self) {
        let mut cum = 0.0;
        for e in &mut self.episodes {
            cum += e.regret_inc;
            e.regret_cum = cum;
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.episodes {
            w.serialize(Row {
                episode: e.episode,
                phase: e.phase,
                d_k: e.d_k,
                ret: e.ret,
                v_opt: e.v_opt,
                v_policy: e.v_policy,
                regret_inc: e.regret_inc,
                regret_cum: e.regret_cum,
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Log(e.to_string()))
    }

    /// Every decision of every episode, one row each.
    pub fn write_decisions_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.episodes {
            for d in &e.decisions {
                w.serialize(DecisionRow {
                    episode: e.episode,
                    state: d.state,
                    option: d.option,
                    stage: d.stage,
                    next_state: d.next_state,
                    next_stage: d.next_stage,
                    reward: d.reward,
                })
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the per-episode table back. Decision lists are not part of
    /// the table and come back empty.
    pub fn read_csv<R: Read>(reader: R) -> Result<Vec<EpisodeRecord>> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = Vec::new();
        for row in r.deserialize::<Row>() {
            let row = row.map_err(csv_err)?;
            out.push(EpisodeRecord {
                episode: row.episode,
                phase: row.phase,
                decisions: Vec::new(),
                d_k: row.d_k,
                ret: row.ret,
                v_opt: row.v_opt,
                v_policy: row.v_policy,
                regret_inc: row.regret_inc,
                regret_cum: row.regret_cum,
            });
        }
        Ok(out)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Log(e.to_string())
}
