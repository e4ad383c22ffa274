//! Command-line driver: instance generation, protocol runs, reductions and
//! referee checks, all reading and writing versioned JSON.
//!
//! Exit codes: 0 on success, 2 on usage or schema errors, 3 when a protocol
//! or referee check fails (the report is still printed).

pub mod args;
mod commands;
pub mod report;

pub use commands::{load, Document};

use args::{Cli, Command};
use clap::Parser;
use std::ffi::OsString;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// The command ran but its result did not pass; `stdout` still holds
    /// the report.
    Failed {
        stdout: String,
        message: String,
    },
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                // --help and --version
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match &cli.command {
        Command::Gen(c) => commands::gen(c),
        Command::Solve(a) => commands::solve(a, echo),
        Command::Reduce(a) => commands::reduce(a),
        Command::Backmap(a) => commands::backmap(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(c) => commands::bench(c),
    };
    match result {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(CliError::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(CliError::Failed { stdout, message }) => Outcome {
            code: EXIT_FAILED,
            stdout,
            stderr: format!("error: {message}\n"),
        },
    }
}
