mod analysis;
mod engine_args;
mod exit;
mod io;
mod relay_cmd;
mod replay;
mod tables;

use clap::{Parser, Subcommand};

use crate::exit::{Classify, CliResult};

#[derive(Debug, Parser)]
#[command(name = "capstream", version, about = "Caption composition engine and streaming relay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a transcript log through one engine and write the frame log
    Replay(replay::ReplayArgs),
    /// Render one frame of a frame log as text
    Snapshot(replay::SnapshotArgs),
    /// Run the relay server
    Serve(relay_cmd::ServeArgs),
    /// Publish a transcript log to a relay, paced by its timestamps
    Feed(relay_cmd::FeedArgs),
    /// Score questionnaire responses
    Score(analysis::ScoreArgs),
    /// Within-subject significance tests
    Stats(analysis::StatsArgs),
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Replay(a) => replay::run(&a),
        Command::Snapshot(a) => replay::snapshot(&a),
        Command::Score(a) => analysis::score(&a),
        Command::Stats(a) => analysis::stats(&a),
        Command::Serve(a) => runtime()?.block_on(relay_cmd::serve(&a)),
        Command::Feed(a) => runtime()?.block_on(relay_cmd::feed(&a)),
    }
}

fn runtime() -> CliResult<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().input()
}

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::exit(exit::OK),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            std::process::exit(f.code);
        }
    }
}
