use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fhsmdp_cli::{compare_runs, run_experiment, validate_model, RunOptions};
use fhsmdp_core::analysis::{renewal_bound, BoundInputs, BoundReport};

#[derive(Parser)]
#[command(name = "fhsmdp", version, about = "Learning with options in finite-horizon SMDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (run, seed) pair of an experiment config.
    Run {
        config: PathBuf,
        /// Added to every seed in the config.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        /// Worker threads (default: one per logical core).
        #[arg(long)]
        workers: Option<usize>,
        /// Write regret.svg even if the config does not ask for it.
        #[arg(long)]
        plot: bool,
        /// Output directory, overriding the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare run directories (runs/<name>) against the first one.
    Compare {
        #[arg(required = true, num_args = 2..)]
        dirs: Vec<PathBuf>,
        /// Also write comparison.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the regret bound shapes.
    Bounds(BoundArgs),
    /// Check a model file.
    Validate { model: PathBuf },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    states: f64,
    #[arg(long)]
    actions: f64,
    #[arg(long)]
    options: f64,
    #[arg(long)]
    episodes: f64,
    #[arg(long)]
    horizon: f64,
    /// Decisions per episode (default: horizon).
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    t_bar: f64,
    #[arg(long, default_value_t = 1.0)]
    tau_bar: f64,
    /// Sub-problem size (defaults: the full problem).
    #[arg(long)]
    option_states: Option<f64>,
    #[arg(long)]
    option_actions: Option<f64>,
    #[arg(long)]
    option_horizon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// With --tau-max, --tau-expect-min and --delta: the decision-count bound.
    #[arg(long, requires_all = ["tau_max", "tau_expect_min", "delta"])]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_expect_min: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Also write bounds.csv here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            seed_offset,
            workers,
            plot,
            out,
        } => {
            let opts = RunOptions {
                seed_offset,
                workers,
                plot,
                out,
            };
            let outcome = run_experiment(&config, &opts)?;
            println!("wrote {} files to {}", outcome.files.len(), outcome.out.display());
            if let Some(e) = &outcome.plot_error {
                eprintln!("warning: plot not written: {e}");
            }
            for c in &outcome.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(outcome.passed())
        }
        Command::Compare { dirs, out } => {
            let cmp = compare_runs(&dirs)?;
            print!("{cmp}");
            if let Some(out) = out {
                std::fs::create_dir_all(&out).with_context(|| format!("--out: cannot create {}", out.display()))?;
                std::fs::write(out.join("comparison.csv"), cmp.to_csv()?)?;
            }
            Ok(true)
        }
        Command::Bounds(b) => {
            let report = BoundReport::compute(BoundInputs {
                states: b.states,
                actions: b.actions,
                options: b.options,
                episodes: b.episodes,
                horizon: b.horizon,
                d: b.d.unwrap_or(b.horizon),
                t_bar: b.t_bar,
                tau_bar: b.tau_bar,
                option_states: b.option_states.unwrap_or(b.states),
                option_actions: b.option_actions.unwrap_or(b.actions),
                option_horizon: b.option_horizon.unwrap_or(b.horizon),
                alpha: b.alpha,
            })?;
            print!("{report}");
            if let (Some(lo), Some(hi), Some(m), Some(delta)) = (b.tau_min, b.tau_max, b.tau_expect_min, b.delta) {
                println!("  decisions per episode   {:>14.6e}", renewal_bound(lo, hi, m, b.horizon, delta)?);
            }
            if let Some(out) = b.out {
                std::fs::create_dir_all(&out).with_context(|| format!("--out: cannot create {}", out.display()))?;
                std::fs::write(out.join("bounds.csv"), report.to_csv())?;
            }
            Ok(true)
        }
        Command::Validate { model } => {
            let (env, report) = validate_model(&model)?;
            let (m, o) = (&env.mdp, &env.options);
            println!(
                "{}: S={} A={} H={} options={}",
                model.display(),
                m.num_states(),
                m.num_actions(),
                m.horizon(),
                o.len()
            );
            println!("{report}");
            Ok(report.is_valid())
        }
    }
}
