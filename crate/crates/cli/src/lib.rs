//! Library behind the `addcomb` binary: argument definitions, input parsing,
//! subcommand execution and report emission.

pub mod args;
pub mod io;
pub mod replay;
pub mod report;
pub mod run;

pub use args::Cli;
pub use report::{Outcome, Report};
pub use run::execute;

/// Exit code when every check passed.
pub const EXIT_OK: u8 = 0;
/// Exit code when a check failed; the report lists counterexamples.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit code for unreadable input or an invalid configuration.
pub const EXIT_CONFIG: u8 = 2;

/// Runs a parsed command line and writes its report; returns the exit code.
pub fn run_cli(cli: &Cli) -> u8 {
    let result = run::configure_jobs(cli.jobs).and_then(|()| {
        let outcome = execute(cli)?;
        report::emit(cli, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(o) if o.failed => EXIT_CHECK_FAILED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    }
}
