use std::process::ExitCode;

use clap::Parser;
use gmtkit::error::CliError;

fn main() -> ExitCode {
    match gmtkit::Cli::try_parse() {
        Ok(cli) => gmtkit::run(&cli),
        // --help and --version
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            ExitCode::SUCCESS
        }
        Err(e) => gmtkit::fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    }
}
