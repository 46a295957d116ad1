//! `har`: operator surface for the activity-recognition pipeline.
//!
//! Exit codes: 0 success, 1 runtime or integrity failure, 2 usage or
//! validation failure (clap argument errors also exit 2).

mod args;
mod commands;
mod run_manifest;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = commands::dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_usage() { 2 } else { 1 });
    }
}
