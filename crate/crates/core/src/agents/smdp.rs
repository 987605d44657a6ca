use super::flat::check_start;
use super::log::{EpisodeRecord, Phase, RunLog};
use super::AgentParams;
use crate::env::{execute_option, flatten_to_smdp, Decision, Environment};
use crate::estimation::{split_confidence, ConfidenceModel, OutcomeSpace, SufficientStats};
use crate::model::{policy_value, FhMdp, OptionSet};
use crate::planning::{exact_backward_induction, extended_value_iteration, flat_backward_induction};
use crate::rng::SimRng;
use crate::{Error, Result};

/// Optimistic learning over the SMDP induced by `options`.
///
/// Regret is measured against the optimal value of the options-induced
/// SMDP; [`RunLog::bias`] holds the gap to the flat optimum.
pub fn run_fh_smdp_ucrl(env: &Environment, options: &OptionSet, params: &AgentParams) -> Result<RunLog> {
    params.check()?;
    let mut rng_env = SimRng::stream(params.seed, 0);
    let mut rng_agent = SimRng::stream(params.seed, 1);
    let run = smdp_learning(&env.mdp, options, env.start, params, &mut rng_env, &mut rng_agent, 1)?;
    let mut log = RunLog {
        agent: "smdp-ucrl".into(),
        start: env.start,
        horizon: env.mdp.horizon(),
        v_star: run.v_star,
        bias: flat_backward_induction(&env.mdp).value(env.start, 1) - run.v_star,
        episodes: run.records,
    };
    log.accumulate();
    Ok(log)
}

pub(crate) struct SmdpRun {
    pub records: Vec<EpisodeRecord>,
    pub v_star: f64,
}

pub(crate) fn smdp_learning(
    mdp: &FhMdp,
    options: &OptionSet,
    start: usize,
    params: &AgentParams,
    rng_env: &mut SimRng,
    rng_agent: &mut SimRng,
    first_episode: usize,
) -> Result<SmdpRun> {
    check_start(mdp, start)?;
    options.validate_from(mdp, start).into_result()?;
    let (ns, no, horizon) = (mdp.num_states(), options.len(), mdp.horizon());
    let smdp = flatten_to_smdp(mdp, options)?;
    let v_star = exact_backward_induction(&smdp).value(start, 1);
    let space = OutcomeSpace::from_options(options, ns, horizon);
    let delta_prime = split_confidence(params.delta, ns, no, horizon, params.episodes)?;
    let support = params.support_size.unwrap_or(ns);
    let initiable = |s: usize, o: usize, h: usize| options.options[o].is_initiable(s, h);
    let mut stats = SufficientStats::new(ns, no, horizon);

    play_smdp(mdp, options, start, rng_env, &mut stats, |s, h| {
        let admissible = options.admissible(s, h);
        if admissible.is_empty() {
            return Err(Error::NoAdmissibleOption { state: s, stage: h });
        }
        Ok(admissible[rng_agent.below(admissible.len())])
    })?;

    let mut records = Vec::with_capacity(params.episodes);
    for k in 0..params.episodes {
        let conf = ConfidenceModel::build(&stats, &space, initiable, delta_prime, support)?;
        let sol = extended_value_iteration(&conf);
        let v_policy = policy_value(&smdp, &sol.policy)?.value(start, 1);
        let decisions = play_smdp(mdp, options, start, rng_env, &mut stats, |s, h| {
            sol.policy.get(s, h).ok_or(Error::PolicyUndefined { state: s, stage: h })
        })?;
        records.push(EpisodeRecord {
            episode: first_episode + k,
            phase: Phase::Main,
            d_k: decisions.len(),
            ret: decisions.iter().map(|d| d.reward).sum(),
            decisions,
            v_opt: sol.value(start, 1),
            v_policy,
            regret_inc: v_star - v_policy,
            regret_cum: 0.0,
        });
    }
    Ok(SmdpRun { records, v_star })
}

fn play_smdp(
    mdp: &FhMdp,
    options: &OptionSet,
    start: usize,
    rng: &mut SimRng,
    stats: &mut SufficientStats,
    mut choose: impl FnMut(usize, usize) -> Result<usize>,
) -> Result<Vec<Decision>> {
    let (mut s, mut h) = (start, 1);
    let mut decisions = Vec::new();
    while h < mdp.horizon() {
        let o = choose(s, h)?;
        let spec = &options.options[o];
        if !spec.is_initiable(s, h) {
            return Err(Error::NotInitiable { option: o, state: s, stage: h });
        }
        let out = execute_option(mdp, spec, s, h, rng)?;
        let d = Decision {
            state: s,
            option: o,
            stage: h,
            next_state: out.next_state,
            next_stage: out.next_stage,
            reward: out.reward,
            duration: out.duration,
        };
        stats.update(&d)?;
        decisions.push(d);
        s = out.next_state;
        h = out.next_stage;
    }
    Ok(decisions)
}
