use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bpimex::config::RunConfig;
use bpimex::runner::{self, ReferenceMode};
use bpimex::Error;
use clap::{Parser, Subcommand};

/// Bound-preserving IMEX experiments: single runs, time-step sweeps and
/// run comparisons driven by JSON configs.
#[derive(Parser)]
#[command(name = "bpimex", version)]
struct Cli {
    /// Output directory (overrides the config's `output`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration; writes diagnostics.csv, summary.json and snapshots.
    Run { config: PathBuf },
    /// Measure errors over a list of time steps; writes errors.csv.
    Sweep {
        config: PathBuf,
        /// Comma-separated, strictly decreasing time steps.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        dt: Vec<f64>,
        /// `self_fine` (same scheme, dt = 1e-6) or `pde_fine` (uncorrected MCN, dt = 1e-7).
        #[arg(long, default_value = "self_fine")]
        reference: ReferenceMode,
    },
    /// Compare the final fields of two configurations; writes compare.json.
    Compare { a: PathBuf, b: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    RunConfig::load(path)
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let out = cli.out.unwrap_or_else(|| cfg.output.clone());
            let summary = runner::run(&cfg, &out)?;
            match summary.divergence_time {
                Some(t) => println!(
                    "diverged at t = {t} after {} steps ({})",
                    summary.steps,
                    summary.divergence_reason.as_deref().unwrap_or("")
                ),
                None => println!(
                    "completed {} steps to t = {}; u in [{}, {}], mass {} -> {}",
                    summary.steps, summary.t, summary.min_u, summary.max_u, summary.initial_mass, summary.final_mass
                ),
            }
            println!("output written to {}", out.display());
        }
        Command::Sweep { config, dt, reference } => {
            let cfg = load(&config)?;
            let out = cli.out.unwrap_or_else(|| cfg.output.clone());
            let rows = runner::sweep(&cfg, &dt, reference, &out)?;
            println!("{:>12} {:>12} {:>12} {:>6}", "dt", "linf_error", "l2_error", "order");
            for r in rows {
                let order = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.2}"));
                println!("{:>12.3e} {:>12.3e} {:>12.3e} {:>6}", r.dt, r.linf_error, r.l2_error, order);
            }
            println!("output written to {}", out.join(runner::ERRORS_FILE).display());
        }
        Command::Compare { a, b } => {
            let (ca, cb) = (load(&a)?, load(&b)?);
            let out = cli.out.unwrap_or_else(|| ca.output.clone());
            let c = runner::compare_to_dir(&ca, &cb, &out)?;
            println!("linf difference {:e}, l2 difference {:e}", c.linf_difference, c.l2_difference);
            println!("output written to {}", out.join(runner::COMPARE_FILE).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
