use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod pipelines;

/// Exit code for malformed input, failed validation and usage errors.
const EXIT_INPUT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcompat", version)]
#[command(about = "Decide compatibility, divisibility and degradability of quantum channels")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GlobalOpts {
    /// Feasibility tolerance of the projection solver
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub eps: f64,

    /// Iteration cap of the projection solver
    #[arg(long, global = true, default_value_t = 20_000)]
    pub max_iter: usize,

    /// Seed for randomized constructions
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Omit witness matrices from reports
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a channel built by one of the library constructors
    Make(MakeArgs),
    /// Run a decision procedure and print a JSON report
    #[command(subcommand)]
    Check(CheckCommand),
    /// Write the complementary channel of a channel
    Complement {
        input: PathBuf,
        /// Output path; prints to stdout if omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a constructive pipeline and print a JSON report with per-step residuals
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MakeKind {
    Identity,
    Depolarizing,
    Unitary,
    Selfcomp,
    Damping,
    Example2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example2Part {
    /// Depolarizing marginal, from C2 x C2 to C2
    Psi,
    /// Identity marginal, from C2 x C2 to C2
    Phi,
    /// Product compatibilizer of the two marginals
    Compatibilizer,
}

#[derive(Args, Debug)]
pub struct MakeArgs {
    pub kind: MakeKind,

    /// Dimension for identity, depolarizing and unitary channels
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    /// Self-complementary family (1 or 2)
    #[arg(long, default_value_t = 1)]
    pub family: u8,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,

    /// Amplitude damping probability
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,

    /// Which channel of the trace-out example to write
    #[arg(long, value_enum, default_value_t = Example2Part::Psi)]
    pub part: Example2Part,

    #[arg(long)]
    pub label: Option<String>,

    /// Output path; prints to stdout if omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Whether two channels with a common input have a compatibilizer
    Compat { psi: PathBuf, phi: PathBuf },
    /// Whether the first channel divides the second
    Div { psi: PathBuf, phi: PathBuf },
    /// Whether the channel degrades to its complementary channel
    Degradable { psi: PathBuf },
    /// Whether the complementary channel degrades to the channel
    Antidegradable { psi: PathBuf },
    /// Whether the channel equals its complementary for the given Kraus form
    Selfdeg { psi: PathBuf },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Thm1,
    Thm2i,
    Thm2ii,
    Corollary,
    Prop1,
    Nocatalysis,
    Family,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub pipeline: Pipeline,

    /// Channel files, as required by the pipeline
    pub inputs: Vec<PathBuf>,

    /// Post-processing channel; drawn at random (full Kraus rank) if omitted
    #[arg(long)]
    pub theta: Option<PathBuf>,

    /// Output dimension of a randomly drawn post-processing channel
    #[arg(long, default_value_t = 2)]
    pub dim_c: usize,

    /// Self-complementary family used when no channel file is given
    #[arg(long, default_value_t = 1)]
    pub family: u8,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Make(args) => commands::make(args, &cli.global).map(|()| None),
        Command::Check(check) => commands::check(check, &cli.global).map(Some),
        Command::Complement { input, output } => {
            commands::complement(input, output.as_deref(), &cli.global).map(|()| None)
        }
        Command::Verify(args) => pipelines::verify(args, &cli.global).map(Some),
    };
    match result {
        Ok(Some(report)) => {
            println!("{}", report.to_json_string());
            ExitCode::from(report.status.exit_code() as u8)
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
