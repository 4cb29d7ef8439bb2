mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use commands::UsageError;

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::Fetch(a) => commands::fetch(a),
        Command::Extract(a) => commands::extract(a),
        Command::Features(a) => commands::features(a),
        Command::Topics(a) => commands::topics(a),
        Command::Select(a) => commands::select(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a, cli.threads, cfg),
        Command::Compare(a) => commands::compare(a, cli.threads, cfg),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => Cli::command().error(ErrorKind::Io, msg).exit(),
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<UsageError>() {
            Some(u) => Cli::command().error(ErrorKind::ArgumentConflict, &u.0).exit(),
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
