use std::process::ExitCode;

use clap::Parser;
use ssclust_cli::commands::configure_threads;
use ssclust_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("THREADS").ok();
    let result = configure_threads(threads.as_deref()).and_then(|()| run(cli, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
