//! `trapdoor` — command-line workbench around the token-analysis library.
//!
//! The subcommands mirror the pipeline stages: `synth` generates a
//! seed-reproducible corpus with fixtures, `probe`/`scan`/`label` analyze
//! tokens dynamically and statically, `features`/`train`/`evaluate` drive
//! the classifier stack, and `report` aggregates exchange analytics
//! (lifetimes, clones, impersonation, scammer profit).
//!
//! Exit codes:
//! * `0` — the run completed with every token processed;
//! * `1` — the run completed but one or more tokens failed (details on
//!   stderr and, where applicable, in the JSON output);
//! * `2` — the invocation itself was invalid: bad flags, or a named input
//!   file that cannot be read or parsed at the batch level.
//!
//! Every randomized subcommand takes `--seed` and is bit-reproducible:
//! equal seeds and inputs give byte-identical outputs.

use clap::{Parser, Subcommand};
use std::process::ExitCode;

mod cmd;

use cmd::Status;

#[derive(Parser)]
#[command(
    name = "trapdoor",
    version,
    about = "Synthesize, probe, label, and classify trapdoor scam tokens"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of trapdoor and benign tokens with fixtures
    Synth(cmd::synth::SynthArgs),
    /// Run the buy/approve/sell probe sequence against one token
    Probe(cmd::probe::ProbeArgs),
    /// Statically scan a contract AST for trapdoor indicators
    Scan(cmd::scan::ScanArgs),
    /// Label every token in a manifest and emit the training dataset
    Label(cmd::label::LabelArgs),
    /// Extract opcode or exchange feature vectors
    Features(cmd::features::FeaturesArgs),
    /// Fit a classifier on a labelled feature dataset
    Train(cmd::train::TrainArgs),
    /// Score a fitted model against a labelled dataset
    Evaluate(cmd::evaluate::EvaluateArgs),
    /// Aggregate lifetime, clone, impersonation, and profit analytics
    Report(cmd::report::ReportArgs),
}

fn main() -> ExitCode {
    // Clap exits with code 2 itself on malformed flags; this mapping covers
    // everything that happens after parsing.
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(args) => cmd::synth::run(args),
        Command::Probe(args) => cmd::probe::run(args),
        Command::Scan(args) => cmd::scan::run(args),
        Command::Label(args) => cmd::label::run(args),
        Command::Features(args) => cmd::features::run(args),
        Command::Train(args) => cmd::train::run(args),
        Command::Evaluate(args) => cmd::evaluate::run(args),
        Command::Report(args) => cmd::report::run(args),
    };
    match result {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
