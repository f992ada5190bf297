use std::process::ExitCode;

use clap::Parser;
use hybridlink_cli::{run, thread_cap, Cli, CliError, THREADS_ENV};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(CliError::Usage(String::new()).exit_code() as u8);
        }
    };
    let result = thread_cap(std::env::var(THREADS_ENV).ok().as_deref())
        .and_then(|threads| run(&cli, threads))
        .and_then(|output| {
            if cli.out.is_none() {
                print!("{}", output.csv);
            }
            output.check()
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
