//! Command-line front end.
//!
//! Exit codes: [`EXIT_PASS`] when every invariant holds, [`EXIT_FAIL`] when
//! at least one fails, [`EXIT_INVALID`] for bad arguments or scenarios.

pub mod report;
pub mod runs;
pub mod scenario;
pub mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use report::RunReport;
use scenario::Scenario;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Runtime(#[from] crate::Error),
}

#[derive(Debug, Parser)]
#[command(name = "spinfermi", version, about = "Spinor algebra and Fermi transport experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run identity suites and print a JSON report.
    Check {
        /// Suite name, or `all`.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = suites::DEFAULT_SEED)]
        seed: u64,
    },
    /// Fermi-transport a vector or spinor along a worldline.
    Transport {
        scenario: PathBuf,
        /// CSV output; a JSON sidecar is written next to it.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Transported rest frame and boosted Dirac frames along a worldline.
    Frames {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Thomas precession over one circular orbit in flat spacetime.
    Precession {
        #[arg(long)]
        radius: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
}

/// Path of the JSON sidecar belonging to a CSV file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(report) => {
            for f in report.failures() {
                let _ = writeln!(
                    err,
                    "invariant failed: {} (residual {:e} > tolerance {:e})",
                    f.name, f.residual, f.tolerance
                );
            }
            if report.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<RunReport, CliError> {
    match cmd {
        Command::Check { suite, seed } => {
            let report = suites::run_check(&suite, seed)?;
            emit(out, &report.to_json())?;
            Ok(report)
        }
        Command::Precession { radius, omega, steps } => {
            let report = runs::run_precession(radius, omega, steps)?;
            emit(out, &report.to_json())?;
            Ok(report)
        }
        Command::Transport { scenario, output } => {
            let scn = Scenario::load(&scenario)?;
            let res = runs::run_transport(&scn)?;
            deliver(&scn, output, res, out, err)
        }
        Command::Frames { scenario, output } => {
            let scn = Scenario::load(&scenario)?;
            let res = runs::run_frames(&scn)?;
            deliver(&scn, output, res, out, err)
        }
    }
}

fn emit(w: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(w, "{text}").map_err(|e| CliError::Io { path: "<stdout>".into(), message: e.to_string() })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// CSV to `-o`, else to the scenario's `output.path`, else to stdout. With a
/// file target the report goes to the sidecar; with stdout it goes to stderr.
fn deliver(
    scn: &Scenario,
    output: Option<PathBuf>,
    res: runs::RunOutput,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<RunReport, CliError> {
    let target = output.or_else(|| scn.output.as_ref().map(|o| PathBuf::from(&o.path)));
    match target {
        Some(path) => {
            write_file(&path, &res.csv)?;
            let mut text = res.report.to_json();
            text.push('\n');
            write_file(&sidecar_path(&path), text.as_bytes())?;
        }
        None => {
            out.write_all(&res.csv).map_err(|e| CliError::Io { path: "<stdout>".into(), message: e.to_string() })?;
            emit(err, &res.report.to_json())?;
        }
    }
    Ok(res.report)
}
