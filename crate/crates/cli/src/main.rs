mod args;
mod commands;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = &mut io::stdout().lock() as &mut dyn Write;
    match cli.command {
        Command::Measure(a) => commands::measure(&a, stdout),
        Command::Sweep(a) => commands::sweep(&commands::sweep_config(&a)?),
        Command::Fit(a) => commands::fit(&a, stdout),
        Command::Constants => commands::constants(stdout),
        Command::Reference(a) => commands::reference(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors exit 2, --help and --version exit 0
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
