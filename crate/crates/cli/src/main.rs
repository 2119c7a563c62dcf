//! `loopon` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or bad input, 3 domain above the
//! enumeration cap, 4 a requested check failed, 1 anything else (I/O).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("LOOPON_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("LOOPON_THREADS must be a count, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Sample(a) => commands::sample(&a),
        Command::Exact(a) => commands::exact(&a),
        Command::Spinint(a) => commands::spinint(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("loopon: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
