mod args;
mod commands;
mod config;
mod error;
mod format;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use error::CliError;

/// Exit status when a computed quantity misses its internal tolerance.
const EXIT_BREACH: u8 = 3;

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let default = match cli.command {
        Command::Curve(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default);
    match &cli.command {
        Command::Optimize(a) => commands::optimize(a, format),
        Command::Curve(a) => commands::curve(a, format),
        Command::Discord(a) => commands::discord(a, format),
        Command::Simulate(a) => commands::simulate(a, format),
        Command::Povm(a) => commands::povm(a, format),
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => return fail(e),
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let Err(e) = emit(&cli, &outcome.body) {
        return fail(e);
    }
    match outcome.breach {
        Some(msg) => {
            eprintln!("tolerance breach: {msg}");
            ExitCode::from(EXIT_BREACH)
        }
        None => ExitCode::SUCCESS,
    }
}
