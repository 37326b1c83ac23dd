use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use whichpath::commands::{self, Outcome, EXIT_CONFIG};
use whichpath::config::{self, Format, RunConfig};

/// Which-path decoherence from entangling radiation.
///
/// Exit codes: 0 success, 2 configuration error, 3 numerical resolution
/// failure, 4 audit violation, 130 interrupted.
#[derive(Parser)]
#[command(name = "whichpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decoherence report for the configured scenario.
    Report(Common),
    /// Grid over one or two scenario parameters from the [sweep] section.
    Sweep(Common),
    /// Randomized audit of Bob's distinguishability bound.
    Audit(Common),
    /// Regime classification over (moment, T_B) with the SNR = 1 contour.
    RegimeMap(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    config: PathBuf,
    /// Override a configuration key, e.g. `--set scenario.t_a=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file (standard output when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(short, long)]
    format: Option<Format>,
    /// Audit seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Audit trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; defaults to WHICHPATH_WORKERS, then the CPU count.
    #[arg(long)]
    workers: Option<usize>,
}

fn resolve(c: &Common) -> Result<RunConfig, Outcome> {
    let mut overrides = c.overrides.clone();
    if let Some(s) = c.seed {
        overrides.push(format!("audit.seed={s}"));
    }
    if let Some(t) = c.trials {
        overrides.push(format!("audit.trials={t}"));
    }
    let mut cfg = config::load(&c.config, &overrides).map_err(|e| Outcome::config(e.0))?;
    if let Some(p) = &c.output {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = c.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

fn workers(c: &Common) -> Result<Option<usize>, Outcome> {
    if let Some(n) = c.workers {
        return Ok(Some(n));
    }
    match std::env::var("WHICHPATH_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Outcome::config(format!("WHICHPATH_WORKERS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli, interrupt: &AtomicBool) -> Outcome {
    let (c, kind) = match &cli.command {
        Command::Report(c) => (c, "report"),
        Command::Sweep(c) => (c, "sweep"),
        Command::Audit(c) => (c, "audit"),
        Command::RegimeMap(c) => (c, "regime-map"),
    };
    let cfg = match resolve(c) {
        Ok(cfg) => cfg,
        Err(o) => return o,
    };
    let threads = match workers(c) {
        Ok(Some(0)) => return Outcome::config("worker count must be at least 1"),
        Ok(n) => n.unwrap_or(0),
        Err(o) => return o,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return Outcome::config(format!("cannot start workers: {e}")),
    };
    pool.install(|| match kind {
        "report" => commands::report(&cfg),
        "sweep" => commands::sweep(&cfg, interrupt),
        "audit" => commands::audit(&cfg, interrupt),
        _ => commands::regime_map(&cfg, interrupt),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let interrupt = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&interrupt);
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
        eprintln!("warning: no interrupt handler: {e}");
    }
    let outcome = run(cli, &interrupt);
    if !outcome.summary.is_empty() {
        eprintln!("{}", outcome.summary);
    }
    ExitCode::from(u8::try_from(outcome.code).unwrap_or(EXIT_CONFIG as u8))
}
