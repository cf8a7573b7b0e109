//! `mm`: Mahler measures, generalized measures and the identity registry from
//! the command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or parse error,
//! 3 numeric failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "mm", version, about = "Classical and generalized Mahler measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: Format,
    /// Seed for quasi-Monte Carlo shifts, Monte Carlo draws and relation sample points.
    #[arg(long, global = true, env = "MM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    /// Record wall-clock time in `wall_ms` (otherwise 0, keeping output byte-stable).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mahler measure of a Laurent polynomial.
    Eval(commands::EvalArgs),
    /// Check registry identities against their closed forms.
    Verify(commands::VerifyArgs),
    /// Generalized measure of a family or of an explicit list of functions.
    Gmm(commands::GmmArgs),
    /// m(P(x₁),…,P(x_n)) against log‖P‖∞ for n = 1..max-n.
    Limit(commands::LimitArgs),
    /// Residuals of every polylogarithm relation in the registry.
    Relations(commands::RelationsArgs),
    /// Sup norm of a polynomial on the torus.
    Supnorm(commands::SupnormArgs),
    /// Registry ids with their closed forms.
    List,
}

/// A command that did not produce output.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

/// Measured elapsed time, or 0 without `--timing`.
pub struct Clock {
    start: Instant,
    enabled: bool,
}

impl Clock {
    pub fn start(g: &Global) -> Self {
        Clock { start: Instant::now(), enabled: g.timing }
    }

    pub fn ms(&self) -> u64 {
        if self.enabled { self.start.elapsed().as_millis() as u64 } else { 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.threads as usize).build_global() {
        eprintln!("mm: cannot start thread pool: {e}");
        return ExitCode::from(3);
    }
    let (name, result) = match &cli.command {
        Command::Eval(a) => ("eval", commands::eval(a, &g)),
        Command::Verify(a) => ("verify", commands::verify(a, &g)),
        Command::Gmm(a) => ("gmm", commands::gmm(a, &g)),
        Command::Limit(a) => ("limit", commands::limit(a, &g)),
        Command::Relations(a) => ("relations", commands::relations(a, &g)),
        Command::Supnorm(a) => ("supnorm", commands::supnorm(a, &g)),
        Command::List => ("list", commands::list(&g)),
    };
    let rows = match result {
        Ok(rows) => rows,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Numeric(m) => eprintln!("mm: {m}"),
            }
            return ExitCode::from(f.code());
        }
    };
    let bytes = output::render(g.format, name, &rows);
    let written = match &g.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| format!("cannot write output: {e}"))
        }
    };
    if let Err(m) = written {
        eprintln!("mm: {m}");
        return ExitCode::from(3);
    }
    if rows.iter().any(|r| r.pass == Some(false)) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
