use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use privsynth::harness::{self, report, RunConfig, RunOutcome};
use privsynth::Result;

#[derive(Parser)]
#[command(
    name = "privsynth",
    version,
    about = "Differentially private tabular synthesis and utility evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for evaluation. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// With no public dataset configured, derive the grouping plan from the
    /// original data. The plan then leaks information the stated epsilon
    /// does not account for; never use this outside experiments.
    #[arg(long)]
    unsafe_public_fallback: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic data bundles.
    Synth(Common),
    /// Score existing bundles against the original data.
    Evaluate(Common),
    /// Render tables and radar charts from a stored report.
    Report(Common),
    /// Synth, evaluate and report in sequence.
    Pipeline(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Synth(c) | Command::Evaluate(c) | Command::Report(c) | Command::Pipeline(c) => c,
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<RunOutcome> {
    let common = cli.command.common();
    let cfg = load_config(common)?;
    match &cli.command {
        Command::Synth(_) => {
            let ctx = harness::load_context(&cfg, common.unsafe_public_fallback)?;
            harness::cmd_synth(&cfg, &ctx)?;
            Ok(RunOutcome::Clean)
        }
        Command::Evaluate(_) => {
            let ctx = harness::load_context(&cfg, common.unsafe_public_fallback)?;
            let out = harness::cmd_evaluate(&cfg, &ctx)?;
            harness::write_evaluation(&cfg, &out)?;
            let artifacts = vec![
                report::report_json_path(&cfg),
                report::metrics_csv_path(&cfg),
            ];
            let leaks = harness::scan::scan_for_leaks(&ctx.original, &artifacts)?;
            if !leaks.is_empty() {
                return Err(privsynth::Error::Config(format!(
                    "aborting: report artifacts quote original records ({})",
                    leaks.join("; ")
                )));
            }
            Ok(if out.degraded { RunOutcome::Degraded } else { RunOutcome::Clean })
        }
        Command::Report(_) => {
            harness::cmd_report(&cfg)?;
            Ok(RunOutcome::Clean)
        }
        Command::Pipeline(_) => harness::cmd_pipeline(&cfg, common.unsafe_public_fallback),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let jobs = cli.command.common().jobs;
    if jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    // Worker count trades speed only; every random stream is keyed by its
    // task coordinates, so any pool size gives identical output.
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(RunOutcome::Clean) => ExitCode::SUCCESS,
        Ok(RunOutcome::Degraded) => {
            eprintln!("completed with metric-level degradation; see the report's absent list");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
