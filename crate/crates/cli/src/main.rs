use clap::Parser;

use hypfill_cli::{run, Cli, Command, ErrorRecord, EXIT_ERROR, EXIT_FAILED};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            let csv_on_stdout = matches!(&cli.command, Command::Series { output: None, .. });
            if !csv_on_stdout {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            }
            if !summary.passed {
                log::error!("{} failed", summary.command);
                std::process::exit(EXIT_FAILED);
            }
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&ErrorRecord::from(&e)).expect("error serializes"));
            std::process::exit(EXIT_ERROR);
        }
    }
}
