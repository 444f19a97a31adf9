//! `hmhp`: generate, infer, eval, loglik, analyze and bench pipelines.

mod analyze;
mod bench;
mod config;
mod evaluate;
mod generate;
mod infer;
mod loglik;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::CliError;

#[derive(Parser)]
#[command(name = "hmhp", version, about = "Hidden Markov Hawkes Process toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate cascades with documents from a network and parameters.
    Generate(generate::GenerateArgs),
    /// Fit topics, parents and strengths by collapsed Gibbs sampling.
    Infer(infer::InferArgs),
    /// Score inferred assignments against gold labels.
    Eval(evaluate::EvalArgs),
    /// Held-out log-likelihood under trained parameters.
    Loglik(loglik::LoglikArgs),
    /// Topic interaction analytics on a transition matrix.
    Analyze(analyze::AnalyzeArgs),
    /// Per-sweep timing on synthetic data.
    Bench(bench::BenchArgs),
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => config::execute(a),
        Command::Infer(a) => config::execute(a),
        Command::Eval(a) => config::execute(a),
        Command::Loglik(a) => config::execute(a),
        Command::Analyze(a) => config::execute(a),
        Command::Bench(a) => config::execute(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
