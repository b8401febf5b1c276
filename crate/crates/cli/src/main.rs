//! `poincare`: command-line front end for the lattice sums, the root
//! geometry and the two evaluators of the Poincare series.

mod args;
mod envelope;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    ExitCode::from(run::execute(cli))
}
