//! `piterm`: check, infer, run and encode π-calculus processes.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser)]
#[command(
    name = "piterm",
    version,
    about = "Termination workbench for the asynchronous π-calculus"
)]
struct Cli {
    /// Output format; `lines` prints KEY=VALUE pairs for scripts.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check an annotated process.
    Check(CheckArgs),
    /// Infer a typing for a process of the localised calculus.
    Infer(InferArgs),
    /// Explore every reduction of a process.
    Run(RunArgs),
    /// Encode a simply-typed λ-term into a process.
    Encode(EncodeArgs),
}

#[derive(Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Environment file; defaults to the `.env` file next to FILE, if any.
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// `#` types only, no subtyping.
    #[arg(long, conflicts_with = "impure")]
    pub ds: bool,
    /// Functional/imperative system; `fun` marks functional names.
    #[arg(long)]
    pub impure: bool,
}

#[derive(Args)]
pub struct InferArgs {
    pub file: PathBuf,
    /// Turn every `>=` level constraint into an equality.
    #[arg(long)]
    pub ds_equality: bool,
    /// Print the level constraint graph.
    #[arg(long)]
    pub dump_graph: bool,
}

#[derive(Args)]
pub struct RunArgs {
    pub file: PathBuf,
    #[arg(long, env = "PITERM_MAX_STATES", default_value_t = 100_000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_depth: usize,
    /// Check that the measure under this environment decreases on every step.
    #[arg(long, value_name = "ENVFILE")]
    pub certify: Option<PathBuf>,
    /// Print every reduction step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args)]
pub struct EncodeArgs {
    pub file: PathBuf,
    /// Name of the result channel.
    #[arg(long, default_value = "p")]
    pub channel: String,
    /// Infer a typing for the encoding.
    #[arg(long, conflicts_with = "run")]
    pub infer: bool,
    /// Explore the reductions of the encoding.
    #[arg(long)]
    pub run: bool,
    #[arg(long, env = "PITERM_MAX_STATES", default_value_t = 100_000)]
    pub max_states: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let result = match &cli.command {
        Command::Check(a) => commands::check(echo, a),
        Command::Infer(a) => commands::infer(echo, a),
        Command::Run(a) => commands::run(echo, a),
        Command::Encode(a) => commands::encode(echo, a),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
