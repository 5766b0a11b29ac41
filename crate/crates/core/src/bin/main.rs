use std::process::ExitCode;

use clap::Parser;
use inertial_mann::cli::{print_table, run_suite, Args};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let config = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match run_suite(&config) {
        Ok(report) => {
            let _ = print_table(&report.rows, std::io::stdout().lock());
            println!("summary: {}", report.summary_file.display());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
