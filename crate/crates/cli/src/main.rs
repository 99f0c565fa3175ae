//! `spinforge` command-line frontend.
//!
//! Every subcommand reads one JSON input (a problem, a model instance, a
//! compiled Hamiltonian or a bare spin polynomial), writes its JSON artifact
//! to `--out` (or stdout) and a human-readable report to stdout (or stderr
//! when the artifact goes to stdout).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod failure;
mod input;
mod report;

use failure::Failure;

#[derive(Parser)]
#[command(name = "spinforge", version, about = "Compile discrete optimization problems into spin Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem into a Hamiltonian and report its resources.
    Compile(CommonArgs),
    /// Find ground states by exhaustive search or simulated annealing.
    Solve(SolveArgs),
    /// Solve, then check the ground states against a brute-force oracle.
    Verify(SolveArgs),
    /// Compare spin and term counts across encodings.
    Resources(CommonArgs),
    /// Parity-transform the Hamiltonian and check spectral equivalence.
    Parity(CommonArgs),
}

#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// Problem, model instance, compiled Hamiltonian or polynomial JSON.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Encoding override; VAR may use `*` wildcards. Later flags win.
    #[arg(long = "encoding", value_name = "VAR=KIND")]
    pub encodings: Vec<String>,
    /// Enforce a constraint (or `core:<var>`) as a penalty or export it.
    #[arg(long = "constraint-mode", value_name = "LABEL=penalty|export")]
    pub modes: Vec<String>,
    /// Fixed penalty weight instead of the heuristic one.
    #[arg(long = "weight", value_name = "LABEL=X")]
    pub weights: Vec<String>,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exhaustive,
    Sa,
}

#[derive(Args, Clone, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
    pub method: Method,
    /// Seed for simulated annealing.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile(a) => commands::compile(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Resources(a) => commands::resources(&a),
        Command::Parity(a) => commands::parity(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as input errors; help and version succeed.
            return if e.use_stderr() {
                ExitCode::from(failure::EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
