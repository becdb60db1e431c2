mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Solve(a) => commands::solve(cli, a),
        Command::Reduce(a) => commands::reduce(cli, a),
        Command::Synth(a) => commands::synth(cli, a),
        Command::Model(a) => commands::model(cli, a),
        Command::Verify(a) => commands::verify(cli, a),
        Command::Gen(a) => commands::gen(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
