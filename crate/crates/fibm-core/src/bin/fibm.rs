//! `fibm`: fair influence blocking maximization toolkit.
//!
//! Subcommands: sample | select | sweep | validate | report.
//! Exit codes: 0 ok, 1 usage/config, 2 validation failure, 3 io.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fibm_core::cli;
use fibm_core::config::{parse_beta_grid, BetaSpec, RunConfig};
use fibm_core::error::{Error, Result};
use fibm_core::optimize::SelectorKind;

#[derive(Parser)]
#[command(
    name = "fibm",
    version,
    about = "Fair influence blocking maximization under demographic parity",
    after_help = "Worker concurrency is capped by the FIBM_THREADS environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key-value config file; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Edge-list file: whitespace-separated `u v [w]` lines, `#` comments.
    #[arg(long, global = true, value_name = "PATH")]
    graph: Option<PathBuf>,

    /// Community file: `node_id label` per line.
    #[arg(long, global = true, value_name = "PATH")]
    communities: Option<PathBuf>,

    /// Output (and report input) directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Base RNG seed; all randomness derives from it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Scalarization weight β in `[0,1]`.
    #[arg(long, global = true, value_name = "X", conflicts_with = "beta_grid")]
    beta: Option<f64>,

    /// β grid as START:STOP:STEP, e.g. 0:1:0.1.
    #[arg(long = "beta-grid", global = true, value_name = "A:B:STEP")]
    beta_grid: Option<String>,

    /// Positive seed budget.
    #[arg(long, global = true, value_name = "N")]
    k: Option<usize>,

    /// Allowable blocking-effectiveness loss μ in `[0,1]`.
    #[arg(long, global = true, value_name = "X")]
    mu: Option<f64>,

    /// Fairness exponent α strictly inside (0,1).
    #[arg(long, global = true, value_name = "X")]
    alpha: Option<f64>,

    /// Seed selector: celf-r | celf | fc.
    #[arg(long, global = true, value_name = "KIND")]
    selector: Option<String>,

    /// Monte Carlo diffusion runs for validation.
    #[arg(long = "mc-runs", global = true, value_name = "N")]
    mc_runs: Option<u64>,

    /// Reverse walks sampled per root.
    #[arg(long = "vrr-samples", global = true, value_name = "N")]
    vrr_samples: Option<u64>,

    /// Experiment repetitions (seeds derived per repetition).
    #[arg(long, global = true, value_name = "N")]
    repetitions: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the VRR index and persist it for reuse.
    Sample,
    /// Select a positive seed set at a single β.
    Select,
    /// Sweep a β grid and emit the Pareto front.
    Sweep,
    /// Cross-check estimators against the exact oracles.
    Validate,
    /// Aggregate run reports into plot-ready CSVs.
    Report,
}

fn build_config(args: &Cli) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &args.graph {
        config.graph_path = Some(v.clone());
    }
    if let Some(v) = &args.communities {
        config.communities_path = Some(v.clone());
    }
    if let Some(v) = &args.out {
        config.out_dir = Some(v.clone());
    }
    if let Some(v) = args.seed {
        config.rng_seed = v;
    }
    if let Some(v) = args.beta {
        config.beta = BetaSpec::Single(v);
    }
    if let Some(v) = &args.beta_grid {
        config.beta = parse_beta_grid(v)?;
    }
    if let Some(v) = args.k {
        config.budget_k = Some(v);
    }
    if let Some(v) = args.mu {
        config.mu = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = &args.selector {
        config.selector = SelectorKind::parse(v)?;
    }
    if let Some(v) = args.mc_runs {
        config.mc_runs = v;
    }
    if let Some(v) = args.vrr_samples {
        config.vrr_samples_per_root = v;
    }
    if let Some(v) = args.repetitions {
        config.repetitions = v;
    }
    Ok(config)
}

fn run(args: &Cli) -> Result<u8> {
    let config = build_config(args)?;
    match args.command {
        Command::Sample => {
            let path = cli::cmd_sample(&config)?;
            println!("index dump written to {}", path.display());
            Ok(0)
        }
        Command::Select => {
            let report = cli::cmd_select(&config)?;
            println!(
                "selected {} seeds x {} repetitions: F={:.4} W={:.4} K={:.4} psi={:.4} lambda={:.1}",
                report
                    .repetitions
                    .first()
                    .and_then(|r| r.solutions.first())
                    .map(|s| s.seeds.len())
                    .unwrap_or(0),
                report.repetitions.len(),
                report.averages.f,
                report.averages.w,
                report.averages.k,
                report.averages.psi_k,
                report.averages.lambda_total,
            );
            Ok(0)
        }
        Command::Sweep => {
            let report = cli::cmd_sweep(&config)?;
            if let Some(front) = report.repetitions.first().and_then(|r| r.front.as_ref()) {
                let kept = front.points.iter().filter(|p| !p.dominated).count();
                println!(
                    "swept {} beta values: {} non-dominated points, reference F={:.4}",
                    front.points.len(),
                    kept,
                    front.reference_f
                );
            }
            Ok(0)
        }
        Command::Validate => {
            let report = cli::cmd_validate(&config)?;
            for check in &report.checks {
                println!("{}", check.render());
            }
            if report.all_passed() {
                println!("all {} checks passed", report.checks.len());
                Ok(0)
            } else {
                Err(Error::Validation(format!(
                    "{} of {} checks failed",
                    report.checks.iter().filter(|c| !c.passed).count(),
                    report.checks.len()
                )))
            }
        }
        Command::Report => {
            let files = cli::cmd_report(&config)?;
            for file in files {
                println!("wrote {}", file.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // --help/--version arrive here as non-error displays.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
