use super::log::{EpisodeRecord, Phase, RunLog};
use super::AgentParams;
use crate::env::{step_primitive, Decision, Environment};
use crate::estimation::{flat_empirical_model, split_confidence, FlatConfidence, FlatStats};
use crate::model::FhMdp;
use crate::planning::{flat_backward_induction, flat_evi, flat_policy_value, FlatPolicy};
use crate::rng::SimRng;
use crate::{Error, Result};

/// Optimistic learning on a flat FH-MDP: the baseline agent.
pub fn run_flat_ucrl(env: &Environment, params: &AgentParams) -> Result<RunLog> {
    params.check()?;
    let mdp = &env.mdp;
    check_start(mdp, env.start)?;
    let mut rng_env = SimRng::stream(params.seed, 0);
    let mut rng_agent = SimRng::stream(params.seed, 1);
    let run = flat_learning(
        mdp,
        &[env.start],
        params.episodes,
        params.delta,
        params.support_size.unwrap_or(mdp.num_states()),
        &mut rng_env,
        &mut rng_agent,
    )?;
    let mut log = RunLog {
        agent: "flat-ucrl".into(),
        start: env.start,
        horizon: mdp.horizon(),
        v_star: flat_backward_induction(mdp).value(env.start, 1),
        bias: 0.0,
        episodes: run.records,
    };
    log.accumulate();
    Ok(log)
}

pub(crate) fn check_start(mdp: &FhMdp, start: usize) -> Result<()> {
    if start >= mdp.num_states() {
        return Err(Error::InvalidParameter(format!(
            "start state {start} outside the model (S={})",
            mdp.num_states()
        )));
    }
    Ok(())
}

pub(crate) struct FlatRun {
    pub records: Vec<EpisodeRecord>,
    /// Greedy policy for the point estimates from all collected data.
    pub policy: FlatPolicy,
}

/// The flat learning loop. Each episode starts from a state drawn
/// uniformly from `starts` (no draw when there is only one). A random
/// warm-up episode precedes the logged ones.
pub(crate) fn flat_learning(
    mdp: &FhMdp,
    starts: &[usize],
    episodes: usize,
    delta: f64,
    support_size: usize,
    rng_env: &mut SimRng,
    rng_agent: &mut SimRng,
) -> Result<FlatRun> {
    let (ns, na, horizon) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let optimal = flat_backward_induction(mdp);
    let delta_prime = split_confidence(delta, ns, na, horizon, episodes)?;
    let mut stats = FlatStats::new(ns, na, horizon);
    let pick = |rng: &mut SimRng| if starts.len() == 1 { starts[0] } else { starts[rng.below(starts.len())] };

    let s0 = pick(rng_env);
    play_flat(mdp, s0, rng_env, &mut stats, |_, _| rng_agent.below(na))?;

    let mut records = Vec::with_capacity(episodes);
    for k in 1..=episodes {
        let conf = FlatConfidence::build(&stats, delta_prime, support_size);
        let sol = flat_evi(&conf);
        let s0 = pick(rng_env);
        let v_policy = flat_policy_value(mdp, &sol.policy)?.value(s0, 1);
        let decisions = play_flat(mdp, s0, rng_env, &mut stats, |s, h| sol.policy.get(s, h))?;
        records.push(EpisodeRecord {
            episode: k,
            phase: Phase::Main,
            d_k: decisions.len(),
            ret: decisions.iter().map(|d| d.reward).sum(),
            decisions,
            v_opt: sol.value(s0, 1),
            v_policy,
            regret_inc: optimal.value(s0, 1) - v_policy,
            regret_cum: 0.0,
        });
    }
    let policy = flat_backward_induction(&flat_empirical_model(&stats)?).policy;
    Ok(FlatRun { records, policy })
}

fn play_flat(
    mdp: &FhMdp,
    start: usize,
    rng: &mut SimRng,
    stats: &mut FlatStats,
    mut choose: impl FnMut(usize, usize) -> usize,
) -> Result<Vec<Decision>> {
    let mut s = start;
    let mut decisions = Vec::with_capacity(mdp.horizon());
    for h in 1..mdp.horizon() {
        let a = choose(s, h);
        let (next, r) = step_primitive(mdp, s, a, h, rng)?;
        stats.update(s, a, h, next, r)?;
        decisions.push(Decision {
            state: s,
            option: a,
            stage: h,
            next_state: next,
            next_stage: h + 1,
            reward: r,
            duration: 1,
        });
        s = next;
    }
    Ok(decisions)
}
