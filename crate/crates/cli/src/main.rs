use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "fjqn",
    version,
    about = "Fork-join queueing networks in max-plus algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report whether the explicit state equation exists for a network file.
    Check { spec: PathBuf },
    /// Evolve departure epochs and write trajectories.
    Run(RunArgs),
}

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    pub method: MethodArg,
    /// Number of steps K; overrides `steps` in the file.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write G_m, H_m, T_m(k) and the extended matrices.
    #[arg(long)]
    pub dump_matrices: bool,
    /// Add arrival, start and completion epochs to the trajectory.
    #[arg(long)]
    pub trace: bool,
    /// Replace the seed of a seeded service source.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Implicit,
    Explicit,
    Extended,
    Oracle,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { spec } => commands::check(&spec),
        Command::Run(args) => commands::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
