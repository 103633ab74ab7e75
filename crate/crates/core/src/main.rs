//! Batch CLI: run a configured pipeline, validate configs, or execute
//! individual tasks.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fermivar::config::{load_config, RunConfig, Task};
use fermivar::error::Error;
use fermivar::runner;

#[derive(Parser)]
#[command(name = "fermivar", version, about = "Variational ground-state solver for interacting fermionic lattice models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration cap for the optimizers (overrides the config).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Worker thread count; accepted for interface stability, the current
    /// tasks run single-threaded.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the task list from the config.
    Run(CommonArgs),
    /// Parse and validate the config without running anything.
    Validate(CommonArgs),
    /// Exact diagonalization only.
    Ed(CommonArgs),
    /// Analytic single-mode energy grid only.
    FsbsM1(CommonArgs),
    /// Optimize, then the pairing measure.
    Pairing(CommonArgs),
}

fn apply_overrides(cfg: &mut RunConfig, args: &CommonArgs) {
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
        cfg.optimizer.seed = seed;
    }
    if let Some(n) = args.max_iters {
        cfg.optimizer.max_iters = n;
    }
}

fn load(args: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = load_config(&args.config)?;
    apply_overrides(&mut cfg, args);
    Ok(cfg)
}

fn execute(command: &Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let cfg = load(args)?;
            let summary = runner::run(&cfg)?;
            print_summary(&summary);
        }
        Command::Validate(args) => {
            let cfg = load(args)?;
            println!(
                "ok: {} task(s), output {}",
                cfg.tasks.len(),
                cfg.output.display()
            );
        }
        Command::Ed(args) => {
            let mut cfg = load(args)?;
            cfg.tasks = vec![Task::Ed];
            let summary = runner::run(&cfg)?;
            print_summary(&summary);
        }
        Command::FsbsM1(args) => {
            let mut cfg = load(args)?;
            if cfg.m1_grid.is_none() {
                return Err(Error::Config("fsbs-m1: config has no [m1] grid section".into()));
            }
            cfg.tasks = vec![Task::FsbsM1];
            runner::run(&cfg)?;
            println!("wrote {}", cfg.output.join("m1.csv").display());
        }
        Command::Pairing(args) => {
            let mut cfg = load(args)?;
            cfg.tasks = vec![Task::Optimize, Task::Pairing];
            let summary = runner::run(&cfg)?;
            print_summary(&summary);
        }
    }
    Ok(())
}

fn print_summary(s: &runner::Summary) {
    if let Some(e) = s.e_ed {
        println!("E_ED      = {e:.10}");
    }
    if let Some(e) = s.e_ghft {
        println!("E_gHFT    = {e:.10}");
    }
    if let Some(e) = s.e_final {
        println!("E_final   = {e:.10}");
    }
    if let Some(n) = s.n_tot {
        println!("N_tot     = {n:.6}");
    }
    if let Some(m) = s.pairing_measure {
        println!("M_pairing = {m:.6}");
    }
    if let Some(stop) = &s.optimize_stop {
        println!("stop      = {stop}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
