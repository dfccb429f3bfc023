use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morass_core::balg::Budget;

mod algebra;
mod construct;
mod forcing;
mod prefix;
mod report;

use report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "morass",
    version,
    about = "Finite morass prefixes, presented Boolean algebras and their forcing posets"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Largest generator count solved by full enumeration.
    #[arg(long, global = true, env = "MORASS_SOLVER_BUDGET", default_value_t = 20)]
    pub enum_limit: usize,
    /// Largest number of search nodes for the propagation solver.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    pub search_limit: usize,
}

impl Global {
    pub fn budget(&self) -> Budget {
        Budget {
            enumeration_limit: self.enum_limit,
            search_limit: self.search_limit,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a morass prefix.
    Build(prefix::BuildArgs),
    /// Verify the axioms of a saved prefix.
    Verify(prefix::VerifyArgs),
    /// Run the stage construction and check every level.
    Construct(construct::ConstructArgs),
    /// Sup-norm of a simple function over a presented algebra.
    Norm(algebra::NormArgs),
    /// c-algebra checks.
    Calg {
        #[command(subcommand)]
        command: algebra::CalgCommand,
    },
    /// Bounds for the norm-contradiction constants.
    Scenario(algebra::ScenarioArgs),
    /// The Cohen poset.
    Cohen {
        #[command(subcommand)]
        command: forcing::CohenCommand,
    },
    /// Conditions of the poset of presented algebras.
    Plam {
        #[command(subcommand)]
        command: forcing::PlamCommand,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Build(a) => prefix::build(a),
        Command::Verify(a) => prefix::verify(a),
        Command::Construct(a) => construct::run(a, g),
        Command::Norm(a) => algebra::norm(a, g),
        Command::Calg { command } => algebra::calg(command),
        Command::Scenario(a) => algebra::scenario(a),
        Command::Cohen { command } => forcing::cohen(command),
        Command::Plam { command } => forcing::plam(command),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| r.emit(cli.global.json, cli.global.report.as_deref()).map(|_| r.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
