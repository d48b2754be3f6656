use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ptgain_cli::config::ExperimentKind;
use ptgain_cli::{execute, CliError, ExperimentConfig};

/// Reproducible feedback-gain experiments.
#[derive(Debug, Parser)]
#[command(name = "ptgain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trajectory-averaged feedback SME against the unconditional master equation.
    Fig2(Common),
    /// Ideal PT dynamics against reduced and full Λ-system gain.
    Fig3(Common),
    /// Eigenvalues of the balanced gain/loss qubit across the exceptional point.
    Spectrum(Common),
    /// RK4 spontaneous decay against the closed form.
    DecayCheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

const THREADS_VAR: &str = "PTGAIN_THREADS";

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::validation(format!("{THREADS_VAR}: expected a positive integer, got `{v}`"))),
        },
        Err(e) => Err(CliError::validation(format!("{THREADS_VAR}: {e}"))),
    }
}

fn run(command: Command) -> Result<Vec<String>, CliError> {
    let (kind, args) = match command {
        Command::Fig2(a) => (ExperimentKind::Fig2, a),
        Command::Fig3(a) => (ExperimentKind::Fig3, a),
        Command::Spectrum(a) => (ExperimentKind::Spectrum, a),
        Command::DecayCheck(a) => (ExperimentKind::DecayCheck, a),
    };
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if args.seed.is_some() {
        cfg.master_seed = args.seed;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::validation(format!("{THREADS_VAR}: cannot start worker pool: {e}")))?;
    pool.install(|| execute(kind, &cfg, args.out.as_deref()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
