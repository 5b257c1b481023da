use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dhccp_cli::{run, Cli, Command, RunSpec, EXIT_USAGE};
use dhccp_core::dhccp::message_table_tsv;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Some(Command::MessageTable) = cli.command {
        print!("{}", message_table_tsv());
        return ExitCode::SUCCESS;
    }
    let spec = match RunSpec::from_cli(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&spec) {
        Ok(outcome) => {
            print!("{}", outcome.report());
            for v in outcome.verdicts.iter().filter(|v| !v.passed) {
                eprintln!(
                    "{} {}: {}{}",
                    v.config,
                    v.check,
                    v.detail,
                    v.trace.as_ref().map_or(String::new(), |t| format!(" [{t}]"))
                );
            }
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
