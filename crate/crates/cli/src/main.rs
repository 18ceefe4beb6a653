//! `qident`: command-line front end for `qident-core`.
//!
//! Results go to stdout as one JSON object or a CSV table; diagnostics go to
//! stderr. Exit status is 0 on success, 2 for usage or validation errors,
//! 3 when a dense build would exceed the dimension cap, 1 for I/O failures.

mod args;
mod commands;
mod output;

use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qident_core::Error;

use args::{Cli, Command};

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Size { .. } => 3,
        Error::Io(_) | Error::Format(_) => 1,
        Error::Argument(_) | Error::Range(_) | Error::Contract(_) => 2,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    let f = cli.format;
    match &cli.command {
        Command::Exact(s) => output::emit(&commands::exact(s)?, f, &mut out)?,
        Command::Spectrum(a) => output::emit(&commands::spectrum(a, cli.cap)?, f, &mut out)?,
        Command::Povm(m) => output::emit(&commands::povm(m, cli.cap)?, f, &mut out)?,
        Command::Simulate(a) => output::emit(&commands::simulate(a, cli.cap)?, f, &mut out)?,
        Command::Mcopy(m) => output::emit(&commands::mcopy(m, cli.cap)?, f, &mut out)?,
        Command::Sweep(a) => output::emit(&commands::sweep(a)?, f, &mut out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = args::validate(&cli) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
