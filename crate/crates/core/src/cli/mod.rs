//! The `sigma2lab` command line.
//!
//! Subcommands `verify`, `solve`, `probe` and `report` each write their
//! artifacts plus one `manifest.json` into `--out`. Exit codes: 0 pass,
//! 1 an invariant failed, 2 bad input or missing artifact (also sampler
//! starvation), 3 Newton nonconvergence, 4 loss of ellipticity.

mod manifest;
pub mod probe;
pub mod report;
pub mod solve;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use manifest::{write_manifest, CliFailure, Outcome, RunManifest, MANIFEST_FILE};

#[derive(Debug, Parser)]
#[command(name = "sigma2lab", version, about = "Experiments on the σ₂ = 1 Hessian equation")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "sigma2lab-out")]
    pub out: PathBuf,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the pointwise inequalities.
    Verify(verify::VerifyArgs),
    /// Solve the Dirichlet problem on a box.
    Solve(solve::SolveArgs),
    /// Run one experiment.
    Probe(probe::ProbeArgs),
    /// Aggregate earlier runs into one summary.
    Report(report::ReportArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Solve(_) => "solve",
            Command::Probe(_) => "probe",
            Command::Report(_) => "report",
        }
    }

    fn config(&self) -> serde_json::Value {
        let v = match self {
            Command::Verify(a) => serde_json::to_value(a),
            Command::Solve(a) => serde_json::to_value(a),
            Command::Probe(a) => Ok(a.config_json()),
            Command::Report(a) => serde_json::to_value(a),
        };
        v.unwrap_or(serde_json::Value::Null)
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Verify(a) => Some(a.seed),
            Command::Probe(a) => a.seed(),
            Command::Solve(_) | Command::Report(_) => None,
        }
    }

    fn execute(&self, workers: Option<usize>, out: &Path) -> Result<Outcome, CliFailure> {
        match self {
            Command::Verify(a) => verify::run(a, workers, out),
            Command::Solve(a) => solve::run(a, out),
            Command::Probe(a) => probe::run(a, out),
            Command::Report(a) => report::run(a, out),
        }
    }
}

/// Run a parsed command; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return 2;
    }
    if let Err(f) = manifest::ensure_dir(&cli.out) {
        eprintln!("error: {}", f.message);
        return f.exit_code;
    }
    let go = || cli.command.execute(cli.workers, &cli.out);
    let result = match cli.workers {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(CliFailure::usage(e.to_string())),
        },
        None => go(),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            Outcome::new(f.exit_code, f.artifacts).with_message(f.message)
        }
    };
    let name = cli.command.name();
    if let Err(e) = write_manifest(&cli.out, name, cli.command.config(), cli.command.seed(), &outcome) {
        eprintln!("error: {e}");
        return 2;
    }
    outcome.exit_code
}

/// Parse `args` (program name first) and run.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
