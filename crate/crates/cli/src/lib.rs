//! Batch experiment harness for the `hpbem` toolkit.
//!
//! Every subcommand writes a CSV table with a header row, optionally a
//! gnuplot-style data file, and returns
//!
//! * `0` on success,
//! * `1` on malformed flags, invalid configuration or a failed computation,
//! * `2` when `--assert` is given and a documented threshold is violated.
//!
//! Output is deterministic: the same configuration yields the same bytes.
//! Wall-clock columns print `-` unless `--timing` is passed.

pub mod config;
pub mod efie;
pub mod output;
pub mod reference;

use clap::error::ErrorKind;
use clap::Parser;
pub use config::{Cli, Command, ConfigError, ExperimentConfig};
pub use output::{Plot, Report, Table};
use std::ffi::OsString;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;

/// Runs the experiment described by `config`.
pub fn execute(config: &ExperimentConfig) -> Result<Report, hpbem::Error> {
    let invalid = |e: ConfigError| hpbem::Error::Configuration(e.0);
    let seed = config.common.seed;
    let timing = config.common.timing;
    match &config.command {
        Command::Infsup(a) => reference::infsup(a.resolve().map_err(invalid)?),
        Command::CommuteCheck(a) => reference::commute_check(a.resolve().map_err(invalid)?, seed),
        Command::InterpStability(a) => reference::interp_stability(a.resolve().map_err(invalid)?),
        Command::FracformCheck(a) => reference::fracform_check(a.resolve().map_err(invalid)?, seed),
        Command::PiolaCheck(a) => reference::piola_check(a.resolve().map_err(invalid)?, seed),
        Command::EfieSolve(a) => efie::efie_solve(&a.resolve().map_err(invalid)?, timing),
        Command::Convergence(a) => efie::convergence(&a.resolve().map_err(invalid)?, seed, timing),
    }
}

fn write_outputs(config: &ExperimentConfig, report: &Report) -> std::io::Result<()> {
    let csv = report.table.to_csv()?;
    match &config.common.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => std::io::stdout().lock().write_all(&csv)?,
    }
    if let Some(path) = &config.common.plot {
        report
            .plot
            .write(std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the experiment and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    let config = match ExperimentConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let report = match execute(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Err(e) = write_outputs(&config, &report) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_INVALID;
    }
    for v in &report.violations {
        eprintln!("threshold violated: {v}");
    }
    if config.common.assert && !report.violations.is_empty() {
        EXIT_THRESHOLD
    } else {
        EXIT_OK
    }
}
