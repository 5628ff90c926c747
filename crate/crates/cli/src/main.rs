mod commands;
mod error;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{figure, query, simulate, validate};

/// Quantum trajectories of a decaying two-level emitter under continuous measurement.
#[derive(Debug, Parser)]
#[command(name = "emitrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one trajectory and write it as CSV
    Simulate(simulate::SimulateArgs),
    /// Write the data behind figure N (1 to 6) as CSV
    Figure(figure::FigureArgs),
    /// Compare Monte Carlo estimates with the closed forms; exits 1 on any failed row
    Validate(validate::ValidateArgs),
    /// Print closed-form excitation probabilities
    Hitprob(query::HitprobArgs),
    /// Print closed-form mean passage times
    Times(query::TimesArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Figure(a) => figure::run(a),
        Command::Validate(a) => validate::run(a),
        Command::Hitprob(a) => query::hitprob(a),
        Command::Times(a) => query::times(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emitrace: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
