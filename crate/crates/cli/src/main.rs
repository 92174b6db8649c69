use std::process::ExitCode;

use clap::Parser;
use iwasawa_cli::{error_json, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.global.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.table);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            if cli.global.json {
                println!("{}", error_json(&e));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
