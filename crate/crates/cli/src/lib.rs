//! Batch front end for the `usv-core` detector: directory-level detection
//! with a run manifest, evaluation against gold tables, paired comparisons,
//! throughput benchmarks, PNG overlays and synthetic fixtures.

pub mod args;
pub mod commands;
pub mod error;
pub mod files;

pub use args::{Cli, Command};
pub use error::{CliError, Outcome};

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Detect(a) => commands::detect::run(&a),
        Command::Eval(a) => commands::eval::run(&a),
        Command::Compare(a) => commands::compare::run(&a),
        Command::Bench(a) => commands::bench::run(&a),
        Command::Render(a) => commands::render::run(&a),
        Command::Synth(a) => commands::synth::run(&a),
    }
}
