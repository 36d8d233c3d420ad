use std::process::ExitCode;

use clap::Parser;
use qbat::{run_command, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match RunConfig::from_cli(cli).and_then(|config| run_command(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
