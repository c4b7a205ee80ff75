use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use hodgemetric_cli::{configure_threads, execute, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("hodgemetric: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    ExitCode::from(execute(&cli))
}
