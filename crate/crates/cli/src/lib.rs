//! Library behind the `causal-control` binary.

mod commands;
mod render;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "causal-control", version, about = "Exact queries on discrete structural causal models")]
pub struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Largest number of noise configurations to enumerate.
    #[arg(long, global = true, env = "CAUSAL_CONTROL_BUDGET")]
    pub budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Cig,
    Mi,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model file and list every violation.
    Validate { file: PathBuf },
    /// Print an exact (interventional, conditional) distribution.
    Dist(DistArgs),
    /// Entropy, conditional entropy or mutual information.
    Info(InfoArgs),
    /// Causal entropy and causal information gain for one intervened variable.
    Causal(CausalArgs),
    /// Rank candidate variables by causal information gain and/or mutual information.
    Rank(RankArgs),
    /// Draw a seeded forward sample.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
pub struct DistArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub target: String,
    /// Atomic intervention, applied before conditioning.
    #[arg(long = "do", value_name = "VAR=VAL")]
    pub interventions: Vec<String>,
    /// Observed value to condition on.
    #[arg(long, value_name = "VAR=VAL")]
    pub given: Vec<String>,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub target: String,
    /// Conditional entropy of the target given this variable.
    #[arg(long, value_name = "VAR", conflicts_with = "mi")]
    pub given: Option<String>,
    /// Mutual information between the target and this variable.
    #[arg(long, value_name = "VAR")]
    pub mi: Option<String>,
}

#[derive(Args, Debug)]
pub struct CausalArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub target: String,
    #[arg(long = "do-var", value_name = "VAR")]
    pub do_var: String,
    /// `uniform`, `obs`, or `@path` to a `value:mass` list.
    #[arg(long, default_value = "uniform")]
    pub protocol: String,
    /// Allow hypothetical interventions on non-intervenable variables.
    #[arg(long)]
    pub allow_nonintervenable: bool,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub target: String,
    /// Comma-separated candidates; defaults to every intervenable variable but the target.
    #[arg(long, value_delimiter = ',')]
    pub candidates: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Metric::Cig)]
    pub metric: Metric,
    /// `uniform` or `obs`.
    #[arg(long, default_value = "uniform")]
    pub protocol: String,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    pub file: PathBuf,
    #[arg(short = 'n', long = "rows", default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "do", value_name = "VAR=VAL")]
    pub intervention: Option<String>,
    /// Write all rows as CSV to this path instead of printing a summary.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 2 (input) and 1 (domain).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

/// Rendered command output and the exit code it warrants.
pub struct Output {
    pub text: String,
    pub exit: u8,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Self { text, exit: 0 }
    }
}

pub struct Context {
    pub format: Format,
    pub budget: causal_control::EnumerationBudget,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Output, CliError> {
    let budget = match cli.budget {
        None => causal_control::EnumerationBudget::default(),
        Some(n) => causal_control::EnumerationBudget::new(n)
            .ok_or_else(|| CliError::Parse("--budget must be positive".into()))?,
    };
    let ctx = Context {
        format: cli.format,
        budget,
    };
    match &cli.command {
        Command::Validate { file } => commands::validate(&ctx, file),
        Command::Dist(a) => commands::dist(&ctx, a),
        Command::Info(a) => commands::info(&ctx, a),
        Command::Causal(a) => commands::causal(&ctx, a),
        Command::Rank(a) => commands::rank(&ctx, a),
        Command::Sample(a) => commands::sample(&ctx, a),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Parse(e.to_string()))?;
    run(cli)
}
