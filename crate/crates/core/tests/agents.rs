mod common;

use fhsmdp_core::agents::{
    learn_option_policy, run_fh_smdp_ucrl, run_flat_ucrl, run_two_phase, AgentParams, Phase, RunLog,
};
use fhsmdp_core::analysis::decile_means;
use fhsmdp_core::env::chain::{LEFT, RIGHT};
use fhsmdp_core::env::{flatten_to_smdp, make_chain_env, make_four_rooms_env, Environment, FourRoomsParams, Scaffold};
use fhsmdp_core::model::{fixed_duration_options, primitive_options, FhMdp, RewardNoise};
use fhsmdp_core::planning::{flat_backward_induction, flat_policy_value};

use common::ks_two_sample;

fn small_rooms(noise: f64) -> Environment {
    let params = FourRoomsParams {
        option_horizon: 8,
        ..FourRoomsParams::new(7, 7, noise)
    };
    make_four_rooms_env(&params, 20).unwrap()
}

#[test]
fn single_episode_runs_log_one_entry() {
    let env = make_chain_env(5, 10, 0.1).unwrap();
    let params = AgentParams::new(1, 0.1, 0);
    assert_eq!(run_fh_smdp_ucrl(&env, &env.options, &params).unwrap().len(), 1);
    assert_eq!(run_flat_ucrl(&env, &params).unwrap().len(), 1);
}

#[test]
fn single_action_has_no_regret() {
    let mdp = FhMdp::stationary(
        3,
        1,
        8,
        RewardNoise::Bernoulli,
        |s, _| vec![((s + 1) % 3, 0.7), (s, 0.3)],
        |s, _| 0.2 * s as f64,
    )
    .unwrap();
    let env = Environment {
        name: "one-action".into(),
        options: primitive_options(&mdp),
        mdp,
        start: 0,
        scaffolds: Vec::new(),
    };
    let log = run_flat_ucrl(&env, &AgentParams::new(50, 0.1, 1)).unwrap();
    assert!(log.episodes.iter().all(|e| e.regret_inc == 0.0));
}

#[test]
fn flat_regret_on_chain_is_sublinear() {
    let env = make_chain_env(6, 12, 0.1).unwrap();
    let log = run_flat_ucrl(&env, &AgentParams::new(2000, 0.1, 2)).unwrap();
    let inc: Vec<f64> = log.episodes.iter().map(|e| e.regret_inc).collect();
    let (first, last) = decile_means(&inc).unwrap();
    assert!(last < first, "first {first}, last {last}");
}

#[test]
fn decisions_per_episode_are_bounded() {
    let env = make_chain_env(8, 20, 0.2).unwrap();
    let log = run_fh_smdp_ucrl(&env, &env.options, &AgentParams::new(200, 0.1, 3)).unwrap();
    assert!(log.episodes.iter().all(|e| e.d_k <= 20 && e.d_k == e.decisions.len()));

    let tau_min = 3;
    let options = fixed_duration_options(&env.mdp, tau_min).unwrap();
    let log = run_fh_smdp_ucrl(&env, &options, &AgentParams::new(200, 0.1, 3)).unwrap();
    assert!(log.episodes.iter().all(|e| e.d_k <= 20usize.div_ceil(tau_min)));
}

#[test]
fn long_option_learning_finds_the_sub_optimum() {
    let env = make_chain_env(6, 20, 0.0).unwrap();
    let scaffold = Scaffold {
        option: 1,
        states: vec![0, 1, 2, 3],
        actions: vec![LEFT, RIGHT],
        horizon: 5,
        targets: vec![3],
        starts: vec![0],
    };
    let learned = learn_option_policy(&env.mdp, &scaffold, 500, 0.1, 11).unwrap();
    assert_eq!(learned.records.len(), 500);
    let sub = &learned.sub.mdp;
    let best = flat_backward_induction(sub);
    let got = flat_policy_value(sub, &learned.policy).unwrap();
    assert_eq!(got.value(0, 1), best.value(0, 1));
    // same actions along the optimal path, where the optimum is unique
    let mut s = 0;
    for h in 1..sub.horizon() {
        let a = best.policy.get(s, h);
        if (0..2).all(|b| b == a || best.q(s, b, h) < best.q(s, a, h)) {
            assert_eq!(learned.policy.get(s, h), a, "state {s}, stage {h}");
        }
        s = sub.transition(s, a, h)[0].0;
    }
}

/// Chain scaffolds: learn to walk right into cell `target` from the cells
/// before it.
fn chain_scaffold(option: usize, target: usize) -> Scaffold {
    Scaffold {
        option,
        states: (0..=target).collect(),
        actions: vec![LEFT, RIGHT],
        horizon: target + 3,
        targets: vec![target],
        starts: (0..target).collect(),
    }
}

#[test]
fn learned_policy_agrees_with_the_full_optimum() {
    let env = make_chain_env(8, 20, 0.1).unwrap();
    let full = flat_backward_induction(&env.mdp);
    let sc = chain_scaffold(3, 3);
    for seed in 0..5 {
        let learned = learn_option_policy(&env.mdp, &sc, 500, 0.1, seed).unwrap();
        for (x, &g) in sc.states.iter().enumerate().take(3) {
            assert_eq!(learned.policy.get(x, 1), full.policy.get(g, 1), "seed {seed}, cell {g}");
        }
    }
}

#[test]
fn one_episode_of_option_learning_gives_a_policy() {
    let env = small_rooms(0.1);
    let sc = &env.scaffolds[0];
    let learned = learn_option_policy(&env.mdp, sc, 1, 0.1, 0).unwrap();
    let sub = &learned.sub.mdp;
    for h in 1..sub.horizon() {
        for s in 0..sub.num_states() {
            assert!(learned.policy.get(s, h) < sc.actions.len());
        }
    }
}

#[test]
fn two_phase_leaves_one_episode_for_phase_two() {
    let env = small_rooms(0.1);
    let budgets = vec![5; env.scaffolds.len()];
    let k = budgets.iter().sum::<usize>() + 1;
    let mut params = AgentParams::new(k, 0.1, 8);
    params.budgets = Some(budgets);
    let log = run_two_phase(&env, &env.scaffolds, &params).unwrap();
    assert_eq!(log.len(), k);
    assert_eq!(log.main_episodes().count(), 1);
    assert_eq!(log.episodes.last().unwrap().phase, Phase::Main);

    params.budgets = Some(vec![k; env.scaffolds.len()]);
    assert!(run_two_phase(&env, &env.scaffolds, &params).is_err());
}

#[test]
fn phase_two_matches_hand_coded_options() {
    let mut env = make_chain_env(8, 20, 0.1).unwrap();
    env.scaffolds = vec![chain_scaffold(2, 2), chain_scaffold(3, 3)];
    let hand = flatten_to_smdp(&env.mdp, &env.options).unwrap();
    let (per_option, main) = (500, 200);
    let k = per_option * env.scaffolds.len() + main;
    let main_regret = |log: &RunLog| log.main_episodes().map(|e| e.regret_inc).sum::<f64>();
    let mut two_phase = Vec::new();
    let mut given = Vec::new();
    for seed in 0..20u64 {
        // the learned policies reproduce the hand-coded options
        let mut options = env.options.clone();
        for sc in &env.scaffolds {
            let learned = learn_option_policy(&env.mdp, sc, per_option, 0.1, seed).unwrap();
            let template = options.get(sc.option).unwrap().clone();
            options.options[sc.option] = sc.embed_policy(&template, |x| learned.policy.get(x, 1));
        }
        assert_eq!(flatten_to_smdp(&env.mdp, &options).unwrap(), hand, "seed {seed}");

        let mut params = AgentParams::new(k, 0.1, seed);
        params.budgets = Some(vec![per_option; env.scaffolds.len()]);
        let log = run_two_phase(&env, &env.scaffolds, &params).unwrap();
        assert_eq!(log.len(), k);
        two_phase.push(main_regret(&log));
        given.push(run_fh_smdp_ucrl(&env, &env.options, &AgentParams::new(main, 0.1, seed)).unwrap().final_regret());
    }
    let (d, p) = ks_two_sample(&two_phase, &given);
    assert!(p > 0.01, "KS statistic {d}, p {p}");
}

#[test]
fn two_phase_run_accounts_for_every_episode() {
    let env = make_four_rooms_env(
        &FourRoomsParams {
            option_horizon: 8,
            ..FourRoomsParams::new(7, 7, 0.1)
        },
        20,
    )
    .unwrap();
    let mut params = AgentParams::new(200, 0.1, 3);
    params.budgets = Some(vec![10; env.scaffolds.len()]);
    let log = run_two_phase(&env, &env.scaffolds, &params).unwrap();
    assert_eq!(log.len(), 200);
}
