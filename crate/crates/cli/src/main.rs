//! `equispec`: eta invariants, heat traces and closed-form equivariant
//! invariants from the command line. Every invocation writes one JSON report
//! to stdout and exits 0 (success), 2 (invalid input) or 3 (numeric failure).

mod args;
mod commands;
mod config;
mod report;
mod selftest;

use clap::Parser;
use report::{render, CliError, EXIT_VALIDATION};
use serde_json::json;
use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (text, status) = run(&argv);
    // a closed pipe is not a failure of the computation
    let _ = writeln!(std::io::stdout(), "{text}");
    std::process::exit(status);
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the rendered report with its exit status.
pub fn run(argv: &[String]) -> (String, i32) {
    let echo = json!({ "argv": argv.get(1..).unwrap_or_default() });
    let merged = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => return render(echo, Err(e)),
    };
    let cli = match args::Cli::try_parse_from(&merged) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (e.to_string().trim_end().to_string(), 0);
            }
            return render(echo, Err(CliError { status: EXIT_VALIDATION, message: e.to_string().trim().to_string(), failures: vec![] }));
        }
    };
    let echo = json!({
        "argv": argv.get(1..).unwrap_or_default(),
        "subcommand": cli.command.name(),
    });
    render(echo, commands::dispatch(&cli.command))
}
