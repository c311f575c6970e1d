//! Command-line front end for the batch experiments.
//!
//! Exit codes: 0 on success, 2 on a config error, 3 when a parameter
//! violates a module precondition, 1 on I/O failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loosehc::experiments::{run_experiment, ExperimentConfig, ExperimentKind};
use loosehc::Error;

/// Environment variable holding the default worker-thread count.
const THREADS_ENV: &str = "LOOSEHC_THREADS";

#[derive(Parser)]
#[command(name = "loosehc", version, about = "Loose Hamilton cycle experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hamiltonicity and isolated vertices of H(n,p;k) across c-multipliers.
    ThresholdSweep(Common),
    /// Spoiled-edge counts of random configurations.
    SpoiledStats(Common),
    /// Loose Hamilton cycles in samples of Λ_d.
    LambdaHamilton(Common),
    /// Perfect matchings in Γ(S,T,p).
    MatchingSuccess(Common),
    /// Critical-point, ψ-root and variance-sum report.
    AnalysisReport(Common),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `out` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides the LOOSEHC_THREADS environment variable.
    #[arg(long)]
    threads: Option<usize>,
    /// Trials per cell; overrides `trials` in the config.
    #[arg(long)]
    trials_override: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV} = `{v}` is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(kind: ExperimentKind, args: Common) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(kind, &args.config)?;
    if let Some(seed) = args.seed {
        cfg.set("seed", seed.to_string())?;
    }
    if let Some(t) = args.trials_override {
        cfg.set("trials", t.to_string())?;
    }
    let out_path = args.out.or_else(|| cfg.out());

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads(args.threads)? {
        if t == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::Io(e.to_string()))?;
    let output = pool.install(|| run_experiment(&cfg))?;

    match &out_path {
        Some(p) => std::fs::write(p, &output.csv)?,
        None => std::io::stdout().write_all(output.csv.as_bytes())?,
    }
    if let Some((p, grid)) = &output.grid {
        std::fs::write(p, grid)?;
    }
    if !output.report.is_empty() {
        print!("{}", output.report);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::ThresholdSweep(a) => (ExperimentKind::ThresholdSweep, a),
        Command::SpoiledStats(a) => (ExperimentKind::SpoiledStats, a),
        Command::LambdaHamilton(a) => (ExperimentKind::LambdaHamilton, a),
        Command::MatchingSuccess(a) => (ExperimentKind::MatchingSuccess, a),
        Command::AnalysisReport(a) => (ExperimentKind::AnalysisReport, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("loosehc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
