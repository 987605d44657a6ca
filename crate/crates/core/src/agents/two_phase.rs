use super::flat::{check_start, flat_learning};
use super::log::{EpisodeRecord, Phase, RunLog};
use super::smdp::smdp_learning;
use super::AgentParams;
use crate::env::{Environment, Scaffold, SubMdp};
use crate::model::FhMdp;
use crate::planning::{flat_backward_induction, FlatPolicy};
use crate::rng::SimRng;
use crate::{Error, Result};

/// Output of option-policy learning on one scaffold.
#[derive(Clone, Debug)]
pub struct LearnedOption {
    pub sub: SubMdp,
    /// Final greedy policy on the sub-problem, in local indices.
    pub policy: FlatPolicy,
    /// One record per learning episode, in the sub-problem's local state
    /// and action indices.
    pub records: Vec<EpisodeRecord>,
}

/// Learns an option's internal policy by running `k_o` episodes of flat
/// optimistic learning on the scaffold's sub-problem.
pub fn learn_option_policy(
    mdp: &FhMdp,
    scaffold: &Scaffold,
    k_o: usize,
    delta: f64,
    seed: u64,
) -> Result<LearnedOption> {
    learn_with(mdp, scaffold, k_o, delta, &mut SimRng::stream(seed, 0), &mut SimRng::stream(seed, 1))
}

fn learn_with(
    mdp: &FhMdp,
    scaffold: &Scaffold,
    k_o: usize,
    delta: f64,
    rng_env: &mut SimRng,
    rng_agent: &mut SimRng,
) -> Result<LearnedOption> {
    if k_o == 0 {
        return Err(Error::InvalidParameter("option budget must be positive".into()));
    }
    let sub = scaffold.sub_mdp(mdp)?;
    let run = flat_learning(
        &sub.mdp,
        &sub.starts,
        k_o,
        delta,
        sub.mdp.num_states(),
        rng_env,
        rng_agent,
    )?;
    Ok(LearnedOption {
        sub,
        policy: run.policy,
        records: run.records,
    })
}

/// Episodes spent learning one option:
/// `floor(cbrt(K^2 S_o^2 H_o^2 A_o / (4 O^2)))`, at least 1 and capped so
/// that all `O` options together leave at least one episode.
pub fn allocate_option_budget(
    episodes: usize,
    states: usize,
    horizon: usize,
    actions: usize,
    options: usize,
) -> Result<usize> {
    if episodes == 0 || states == 0 || horizon == 0 || actions == 0 || options == 0 {
        return Err(Error::InvalidParameter("budget inputs must be positive".into()));
    }
    if options >= episodes {
        return Err(Error::BudgetInfeasible { options, episodes });
    }
    let (k, s, h, a, o) = (episodes as f64, states as f64, horizon as f64, actions as f64, options as f64);
    let raw = (k * k * s * s * h * h * a / (4.0 * o * o)).cbrt();
    let k_o = ((raw + 1e-9).floor() as usize).max(1);
    if options * k_o >= episodes {
        return Ok((episodes - 1) / options);
    }
    Ok(k_o)
}

/// Learns every scaffolded option on its sub-problem, then runs the
/// option-level learner with the learned policies frozen.
///
/// Phase-1 episodes are charged the full optimal value of the task.
/// Phase-2 regret is measured against the optimum of the learned option
/// set; the log's bias is the gap from that to the flat optimum.
pub fn run_two_phase(env: &Environment, scaffolds: &[Scaffold], params: &AgentParams) -> Result<RunLog> {
    params.check()?;
    check_start(&env.mdp, env.start)?;
    if scaffolds.is_empty() {
        return Err(Error::InvalidParameter("two-phase run needs at least one scaffold".into()));
    }
    let k = params.episodes;
    let budgets = match &params.budgets {
        Some(b) if b.len() != scaffolds.len() => {
            return Err(Error::InvalidParameter(format!(
                "{} budgets for {} scaffolds",
                b.len(),
                scaffolds.len()
            )))
        }
        Some(b) => b.clone(),
        None => scaffolds
            .iter()
            .map(|sc| allocate_option_budget(k, sc.states.len(), sc.horizon, sc.actions.len(), scaffolds.len()))
            .collect::<Result<_>>()?,
    };
    let spent: usize = budgets.iter().sum();
    if spent >= k || budgets.contains(&0) {
        return Err(Error::BudgetInfeasible {
            options: scaffolds.len(),
            episodes: k,
        });
    }

    let v_flat = flat_backward_induction(&env.mdp).value(env.start, 1);
    let mut options = env.options.clone();
    let mut records = Vec::with_capacity(k);
    for (i, (sc, &k_o)) in scaffolds.iter().zip(&budgets).enumerate() {
        let template = options
            .get(sc.option)
            .ok_or_else(|| Error::InvalidParameter(format!("scaffold targets unknown option {}", sc.option)))?;
        let stream = 2 + 2 * i as u64;
        let learned = learn_with(
            &env.mdp,
            sc,
            k_o,
            params.delta,
            &mut SimRng::stream(params.seed, stream),
            &mut SimRng::stream(params.seed, stream + 1),
        )?;
        let embedded = sc.embed_policy(template, |x| learned.policy.get(x, 1));
        options.options[sc.option] = embedded;
        for mut r in learned.records {
            r.episode = records.len() + 1;
            r.phase = Phase::Options;
            r.v_policy = 0.0;
            r.regret_inc = v_flat;
            records.push(r);
        }
    }

    let main = smdp_learning(
        &env.mdp,
        &options,
        env.start,
        &AgentParams {
            episodes: k - spent,
            ..params.clone()
        },
        &mut SimRng::stream(params.seed, 0),
        &mut SimRng::stream(params.seed, 1),
        records.len() + 1,
    )?;
    records.extend(main.records);
    let mut log = RunLog {
        agent: "two-phase".into(),
        start: env.start,
        horizon: env.mdp.horizon(),
        v_star: main.v_star,
        bias: v_flat - main.v_star,
        episodes: records,
    };
    log.accumulate();
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_worked_example() {
        assert_eq!(allocate_option_budget(1000, 4, 5, 4, 2).unwrap(), 464);
    }

    #[test]
    fn budget_cap_and_errors() {
        assert_eq!(allocate_option_budget(10, 4, 5, 4, 2).unwrap(), 4);
        assert_eq!(allocate_option_budget(3, 100, 100, 100, 2).unwrap(), 1);
        assert!(matches!(
            allocate_option_budget(2, 1, 1, 1, 2),
            Err(Error::BudgetInfeasible { options: 2, episodes: 2 })
        ));
    }

    #[test]
    fn budget_shrinks_with_more_options() {
        let raw = |o: f64| (1e12f64 * 16.0 * 25.0 * 4.0 / (4.0 * o * o)).cbrt();
        assert!((raw(2.0) / raw(4.0) - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
        let a = allocate_option_budget(1_000_000, 4, 5, 4, 2).unwrap() as f64;
        let b = allocate_option_budget(1_000_000, 4, 5, 4, 4).unwrap() as f64;
        assert!((a / b - 2f64.powf(2.0 / 3.0)).abs() < 1e-3);
    }
}
