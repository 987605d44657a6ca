//! The acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use fhsmdp_core::agents::{run_fh_smdp_ucrl, run_flat_ucrl, AgentKind, AgentParams, RunConfig, RunLog};
use fhsmdp_core::analysis::{
    crossover_episodes, decile_means, empirical_d_vs_bound, fit_power_law, fixed_duration_regret_bound,
    option_regret_bound, option_stats, renewal_bound, two_phase_regret_bound, verify_pdl,
};
use fhsmdp_core::agents::allocate_option_budget;
use fhsmdp_core::env::{
    chain::{LEFT, RIGHT},
    flatten_to_smdp, make_chain_env, make_four_rooms_env, EnvSpec, Environment, FourRoomsParams, OptionSetSpec,
};
use fhsmdp_core::estimation::{empirical_bernstein_radius, weissman_radius, RewardMoments};
use fhsmdp_core::instances::{perturb_smdp, random_policy, random_smdp};
use fhsmdp_core::model::{fixed_duration_options, primitive_options, OptionSet, OptionSpec};
use fhsmdp_core::planning::{exact_backward_induction, optimistic_row};
use fhsmdp_core::SimRng;
use rayon::prelude::*;

use common::{enumerate_optimum, evaluate_choice, lp_optimistic_value, sig};

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {verdict} {name} [{:.1}s] {detail}", elapsed.as_secs_f64());
}

/// The four-rooms instance used for the long learning runs.
fn four_rooms() -> Environment {
    make_four_rooms_env(&FourRoomsParams::new(11, 11, 0.0), 30).unwrap()
}

fn criterion_01_exact_planning_matches_enumeration() -> bool {
    let t = Instant::now();
    let mut rng = SimRng::seed_from(101);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (s, o, h) = (1 + rng.below(3), 1 + rng.below(2), 2 + rng.below(3));
        let smdp = random_smdp(s, o, h, 4, &mut rng).unwrap();
        let sol = exact_backward_induction(&smdp);
        let best = enumerate_optimum(&smdp);
        let choice: Vec<usize> = (1..h)
            .flat_map(|stage| (0..s).map(move |st| (st, stage)))
            .map(|(st, stage)| sol.policy.get(st, stage).unwrap())
            .collect();
        let achieved = evaluate_choice(&smdp, &choice).unwrap();
        for st in 0..s {
            worst = worst.max((sol.value(st, 1) - best[st]).abs());
            worst = worst.max((achieved[st] - best[st]).abs());
        }
    }
    let elapsed = t.elapsed();
    let pass = worst <= 1e-12 && elapsed < Duration::from_secs(10);
    report(1, "exact planning oracle", pass, elapsed, format!("max error {worst:.2e}"));
    pass
}

fn criterion_02_performance_difference_identity() -> bool {
    let t = Instant::now();
    let mut rng = SimRng::seed_from(202);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (s, o, h) = (1 + rng.below(3), 1 + rng.below(2), 2 + rng.below(4));
        let a = random_smdp(s, o, h, 4, &mut rng).unwrap();
        let b = if i % 2 == 0 {
            perturb_smdp(&a, &mut rng).unwrap()
        } else {
            random_smdp(s, o, h, 4, &mut rng).unwrap()
        };
        let policy = random_policy(&a, &mut rng);
        let check = verify_pdl(&a, &b, &policy, rng.below(s)).unwrap();
        worst = worst.max(check.gap);
    }
    let elapsed = t.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(30);
    report(2, "performance-difference identity", pass, elapsed, format!("max gap {worst:.2e}"));
    pass
}

fn criterion_03_optimism() -> bool {
    let t = Instant::now();
    let env = make_chain_env(6, 12, 0.1).unwrap();
    let logs: Vec<RunLog> = (0..10u64)
        .into_par_iter()
        .map(|seed| run_fh_smdp_ucrl(&env, &env.options, &AgentParams::new(20, 0.1, seed)).unwrap())
        .collect();
    let v_star = logs[0].v_star;
    let total: usize = logs.iter().map(|l| l.len()).sum();
    let optimistic = logs
        .iter()
        .flat_map(|l| &l.episodes)
        .filter(|e| e.v_opt >= v_star - 1e-9)
        .count();
    let fraction = optimistic as f64 / total as f64;
    let elapsed = t.elapsed();
    let pass = total == 200 && fraction >= 0.9 && elapsed < Duration::from_secs(60);
    report(3, "optimism", pass, elapsed, format!("{optimistic}/{total} episodes optimistic"));
    pass
}

fn criterion_04_l1_maximizer_matches_lp() -> bool {
    let t = Instant::now();
    let mut rng = SimRng::seed_from(404);
    let mut worst = 0.0f64;
    let mut feasible = true;
    for _ in 0..500 {
        let n = 1 + rng.below(6);
        let mut p: Vec<f64> = (0..n).map(|_| if rng.bernoulli(0.2) { 0.0 } else { rng.uniform() }).collect();
        if p.iter().all(|&x| x == 0.0) {
            p[0] = 1.0;
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let v: Vec<f64> = (0..n).map(|_| 10.0 * rng.uniform()).collect();
        let beta = 2.2 * rng.uniform();
        let q = optimistic_row(&p, beta, &v).unwrap();
        let ours: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
        let l1: f64 = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        feasible &= q.iter().all(|&x| x >= 0.0) && (q.iter().sum::<f64>() - 1.0).abs() < 1e-12 && l1 <= beta + 1e-12;
        worst = worst.max((ours - lp_optimistic_value(&p, beta, &v)).abs());
    }
    let elapsed = t.elapsed();
    let pass = feasible && worst <= 1e-9 && elapsed < Duration::from_secs(10);
    report(4, "L1 maximizer vs LP", pass, elapsed, format!("max objective gap {worst:.2e}"));
    pass
}

fn criterion_05_flat_reduction_is_exact() -> bool {
    let t = Instant::now();
    let env = make_chain_env(6, 12, 0.2).unwrap();
    let primitive = primitive_options(&env.mdp);
    let mut identical = 0;
    for seed in 0..5 {
        let params = AgentParams::new(300, 0.1, seed);
        let a = run_fh_smdp_ucrl(&env, &primitive, &params).unwrap();
        let b = run_flat_ucrl(&env, &params).unwrap();
        let same = a.len() == b.len()
            && a.episodes.iter().zip(&b.episodes).all(|(x, y)| {
                x.decisions == y.decisions
                    && x.v_opt == y.v_opt
                    && x.v_policy == y.v_policy
                    && x.regret_inc == y.regret_inc
                    && x.regret_cum == y.regret_cum
            });
        identical += usize::from(same);
    }
    let elapsed = t.elapsed();
    let pass = identical == 5;
    report(5, "flat reduction", pass, elapsed, format!("{identical}/5 seeds identical"));
    pass
}

fn criterion_06_fixed_length_options() -> bool {
    let t = Instant::now();
    let env = make_chain_env(10, 30, 0.1).unwrap();
    let options = fixed_duration_options(&env.mdp, 5).unwrap();
    let log = run_fh_smdp_ucrl(&env, &options, &AgentParams::new(100, 0.1, 6)).unwrap();
    let exact = log.episodes.iter().filter(|e| e.d_k == 6).count();
    let elapsed = t.elapsed();
    let pass = exact == log.len();
    report(6, "fixed-length options", pass, elapsed, format!("{exact}/{} episodes with d_k = 6", log.len()));
    pass
}

/// Options on the chain whose holding time is 2 or 4 with equal odds
/// (started at stages 1 mod 4) or exactly 2 (started at stages 3 mod 4).
fn two_or_four_options(env: &Environment) -> OptionSet {
    let (ns, horizon) = (env.mdp.num_states(), env.mdp.horizon());
    let options = [LEFT, RIGHT]
        .into_iter()
        .map(|a| {
            let mut o = OptionSpec::new(format!("hold-{a}"), ns, horizon);
            for h in 1..=horizon {
                for s in 0..ns {
                    o.set_action(s, h, Some(a));
                    if h < horizon {
                        o.set_initiable(s, h, h % 4 == 1 || h % 4 == 3);
                        o.set_termination(
                            s,
                            h,
                            match h % 4 {
                                1 => 1.0,
                                3 => 0.5,
                                _ => 0.0,
                            },
                        );
                    }
                }
            }
            o
        })
        .collect();
    OptionSet::new(options)
}

fn criterion_07_renewal_bound_coverage() -> bool {
    let t = Instant::now();
    let env = make_chain_env(8, 30, 0.2).unwrap();
    let options = two_or_four_options(&env);
    let stats = option_stats(&flatten_to_smdp(&env.mdp, &options).unwrap());
    let bound = renewal_bound(stats.tau_min, stats.tau_max, stats.tau_expect_min, 30.0, 0.1).unwrap();
    let log = run_fh_smdp_ucrl(&env, &options, &AgentParams::new(2000, 0.1, 7)).unwrap();
    let coverage = empirical_d_vs_bound(&log, bound, 0.1);
    let elapsed = t.elapsed();
    let pass = stats.tau_min == 2.0
        && stats.tau_max == 4.0
        && coverage.episodes == 2000
        && coverage.passes
        && elapsed < Duration::from_secs(60);
    report(
        7,
        "renewal bound coverage",
        pass,
        elapsed,
        format!("bound {bound:.2}, coverage {:.4}", coverage.fraction),
    );
    pass
}

fn mean_increments(logs: &[RunLog]) -> Vec<f64> {
    let k = logs[0].len();
    (0..k)
        .map(|i| logs.iter().map(|l| l.episodes[i].regret_inc).sum::<f64>() / logs.len() as f64)
        .collect()
}

fn criterion_08_sublinear_regret() -> bool {
    let t = Instant::now();
    let env = four_rooms();
    let logs: Vec<RunLog> = (0..10u64)
        .into_par_iter()
        .map(|seed| run_fh_smdp_ucrl(&env, &env.options, &AgentParams::new(5000, 0.1, seed)).unwrap())
        .collect();
    let inc = mean_increments(&logs);
    let (first, last) = decile_means(&inc).unwrap();
    let cum: Vec<f64> = inc
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let (_, p) = fit_power_law(&cum).unwrap();
    let elapsed = t.elapsed();
    let pass = last <= first / 3.0 && p < 0.85 && elapsed < Duration::from_secs(300);
    report(
        8,
        "sublinear regret",
        pass,
        elapsed,
        format!("first decile {first:.3}, last decile {last:.3}, exponent {p:.3}"),
    );
    pass
}

fn criterion_09_hierarchy_beats_flat() -> bool {
    let t = Instant::now();
    let env = four_rooms();
    let smdp = flatten_to_smdp(&env.mdp, &env.options).unwrap();
    let tau_bar = option_stats(&smdp).tau_mean;
    let pairs: Vec<(f64, f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let params = AgentParams::new(5000, 0.1, seed);
            let h = run_fh_smdp_ucrl(&env, &env.options, &params).unwrap();
            let f = run_flat_ucrl(&env, &params).unwrap();
            (h.final_regret(), f.final_regret(), h.bias)
        })
        .collect();
    let wins = pairs.iter().filter(|(h, f, _)| h < f).count();
    let zero_bias = pairs.iter().all(|(_, _, b)| b.abs() < 1e-9);
    let elapsed = t.elapsed();
    let pass = zero_bias && wins >= 16;
    report(
        9,
        "hierarchy beats flat",
        pass,
        elapsed,
        format!("{wins}/20 paired seeds, mean holding time {tau_bar:.2}"),
    );
    pass
}

fn criterion_10_bound_calculators() -> bool {
    let t = Instant::now();
    let checks = [
        (option_regret_bound(20.0, 4.0, 1e4, 6.0, 5.0, 30.0), 7.468e5),
        (fixed_duration_regret_bound(20.0, 4.0, 1e4, 5.0, 30.0), 7.468e5),
        (two_phase_regret_bound(1e4, 5.0, 10.0, 4.0, 4.0, 30.0, 40.0), 1.519e6),
        (crossover_episodes(10.0, 20.0, 4.0, 0.5, 4.0).unwrap(), 6.554e8),
        (renewal_bound(1.0, 4.0, 2.0, 20.0, 0.1).unwrap(), 36.81),
        (allocate_option_budget(1000, 4, 5, 4, 2).unwrap() as f64, 464.0),
    ];
    let matched = checks.iter().filter(|(got, want)| sig(*got, 4) == *want).count();
    let elapsed = t.elapsed();
    let pass = matched == checks.len() && elapsed < Duration::from_secs(1);
    report(10, "bound calculators", pass, elapsed, format!("{matched}/{} worked examples", checks.len()));
    pass
}

fn criterion_11_confidence_coverage() -> bool {
    let t = Instant::now();
    let trials = 10_000;
    let delta = 0.05;
    let floor = 1.0 - delta - 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    let mut rng = SimRng::seed_from(1111);

    // rewards u^2 with u uniform: mean 1/3, support [0, 1]
    let n = 40;
    let mut covered_r = 0;
    for _ in 0..trials {
        let mut m = RewardMoments::default();
        for _ in 0..n {
            let u = rng.uniform();
            m.push(u * u);
        }
        let radius = empirical_bernstein_radius(n as u64, m.variance(), delta, f64::INFINITY);
        covered_r += usize::from((m.mean() - 1.0 / 3.0).abs() <= radius);
    }

    let p = [0.4, 0.25, 0.2, 0.1, 0.05];
    let row: Vec<(usize, f64)> = p.iter().copied().enumerate().collect();
    let mut covered_p = 0;
    for _ in 0..trials {
        let mut counts = [0u32; 5];
        for _ in 0..n {
            counts[rng.categorical(&row)] += 1;
        }
        let l1: f64 = counts.iter().zip(p).map(|(&c, q)| (c as f64 / n as f64 - q).abs()).sum();
        covered_p += usize::from(l1 <= weissman_radius(n as u64, delta, p.len()));
    }
    let (fr, fp) = (covered_r as f64 / trials as f64, covered_p as f64 / trials as f64);
    let elapsed = t.elapsed();
    let pass = fr >= floor && fp >= floor && elapsed < Duration::from_secs(60);
    report(11, "confidence coverage", pass, elapsed, format!("reward {fr:.4}, transition {fp:.4}, floor {floor:.4}"));
    pass
}

fn criterion_12_determinism() -> bool {
    let t = Instant::now();
    let chain = EnvSpec::Chain {
        length: 6,
        horizon: 12,
        noise: 0.2,
        reward_noise: Default::default(),
        strides: None,
    };
    let rooms = EnvSpec::FourRooms {
        width: 7,
        height: 7,
        horizon: 20,
        noise: 0.1,
        reward_noise: Default::default(),
        option_horizon: Some(8),
    };
    let configs = [
        (AgentKind::SmdpUcrl, chain.clone(), OptionSetSpec::Env, None),
        (AgentKind::SmdpUcrl, chain.clone(), OptionSetSpec::FixedDuration { tau: 3 }, None),
        (AgentKind::FlatUcrl, chain, OptionSetSpec::Env, None),
        (AgentKind::TwoPhase, rooms, OptionSetSpec::Env, Some(vec![20; 9])),
    ];
    let mut identical = 0;
    for (agent, env, options, budgets) in configs.iter().cloned() {
        let config = RunConfig {
            agent,
            episodes: 300,
            delta: 0.1,
            seed: 12,
            support_size: None,
            env,
            options,
            budgets,
        };
        let csv = |log: RunLog| {
            let mut decisions = Vec::new();
            log.write_decisions_csv(&mut decisions).unwrap();
            (log.to_csv_string().unwrap(), decisions)
        };
        identical += usize::from(csv(config.run().unwrap()) == csv(config.run().unwrap()));
    }
    let elapsed = t.elapsed();
    let pass = identical == configs.len();
    report(12, "determinism", pass, elapsed, format!("{identical}/{} configs byte-identical", configs.len()));
    pass
}

fn main() {
    let criteria: [fn() -> bool; 12] = [
        criterion_01_exact_planning_matches_enumeration,
        criterion_02_performance_difference_identity,
        criterion_03_optimism,
        criterion_04_l1_maximizer_matches_lp,
        criterion_05_flat_reduction_is_exact,
        criterion_06_fixed_length_options,
        criterion_07_renewal_bound_coverage,
        criterion_08_sublinear_regret,
        criterion_09_hierarchy_beats_flat,
        criterion_10_bound_calculators,
        criterion_11_confidence_coverage,
        criterion_12_determinism,
    ];
    let mut failed = 0;
    for (i, run) in criteria.iter().enumerate() {
        let t = Instant::now();
        match std::panic::catch_unwind(run) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                report(i as u32 + 1, "aborted", false, t.elapsed(), "panicked".into());
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
