//! Command-line front end. [`run`] parses arguments, dispatches the
//! subcommand and maps failures to exit codes: 0 success, 1 validation or
//! usage error, 2 runtime or endpoint error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Validation(e) | Failure::Runtime(e) => e,
        }
    }
}

pub(crate) fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Validation(e.into())
}

pub(crate) fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

#[derive(Debug, Parser)]
#[command(name = "meddialog", version, about = "Generate and evaluate synthetic Dutch doctor–patient dialogues")]
pub struct Cli {
    /// Config file (default: ./meddialog.toml when present)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for evaluation and concurrent dialogue generation
    #[arg(long, short = 'j', global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse transcripts into structured dialogue documents (JSON)
    Parse(ParseArgs),
    /// Generate synthetic dialogues through the configured chat endpoint
    Generate(GenerateArgs),
    /// Compute the metric suite over a corpus
    Evaluate(EvaluateArgs),
    /// Validate ratings or analyse them against a metric report
    #[command(subcommand)]
    Ratings(RatingsCommand),
    /// Merge a metric report and a qualitative report into one document
    Report(ReportArgs),
    /// Write the built-in lexicons, prompt templates and a config template
    ExportDefaults(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceArg {
    RealSample,
    Synthetic,
    Unknown,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Transcript files or directories of *.txt files
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Extra speaker labels, as LABEL=doctor|patient (repeatable)
    #[arg(long = "label", value_name = "LABEL=ROLE")]
    pub labels: Vec<String>,
    /// Extra abbreviations that never end a sentence (repeatable)
    #[arg(long = "abbreviation")]
    pub abbreviations: Vec<String>,
    #[arg(long, value_enum, default_value = "unknown")]
    pub source: SourceArg,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Source transcripts; each is chunked and every chunk yields one dialogue
    pub sources: Vec<PathBuf>,
    /// Files to cut few-shot pairs from (repeatable)
    #[arg(long = "fewshot")]
    pub fewshot: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Resume an interrupted job directory instead of starting new ones
    #[arg(long, value_name = "JOB_DIR", conflicts_with_all = ["sources", "fewshot"])]
    pub resume: Option<PathBuf>,
    /// Prompt template directory overriding the built-in templates
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    /// Comma-separated topic list
    #[arg(long, value_delimiter = ',')]
    pub topics: Option<Vec<String>>,
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub token_ratio: Option<f64>,
    /// Reference average sentence length to state in the prompt
    #[arg(long)]
    pub asl_reference: Option<f64>,
    /// Drop leading greeting lines from every segment after the first
    #[arg(long)]
    pub suppress_greetings: bool,
    /// Generate at most this many dialogues
    #[arg(long)]
    pub max_dialogues: Option<usize>,
    #[arg(long)]
    pub endpoint_url: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub temperature: Option<f32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoleNormArg {
    PerToken,
    PerTurn,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory of *.txt transcripts and/or *.json dialogue documents
    #[arg(long)]
    pub corpus: PathBuf,
    /// Lexicon directory (default: built-in lexicons)
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// MSTTR/MATTR window in tokens
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum)]
    pub role_normalization: Option<RoleNormArg>,
    /// Also write plot-ready CSVs under <out>/figures
    #[arg(long)]
    pub figures: bool,
    /// Print the text table to standard output
    #[arg(long)]
    pub print: bool,
}

#[derive(Debug, Subcommand)]
pub enum RatingsCommand {
    /// Validate a ratings CSV and write a normalized copy
    Ingest(IngestArgs),
    /// Descriptives, Krippendorff's alpha and quant–qual Spearman rho
    Report(RatingsReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub ratings: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LevelArg {
    Nominal,
    Ordinal,
    Interval,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PoolingArg {
    Mean,
    Median,
}

#[derive(Debug, Args)]
pub struct RatingsReportArgs {
    pub ratings: PathBuf,
    /// metric_report.json written by `evaluate`
    #[arg(long)]
    pub metrics: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub alpha_level: Option<LevelArg>,
    #[arg(long, value_enum)]
    pub pooling: Option<PoolingArg>,
    #[arg(long)]
    pub figures: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub metrics: PathBuf,
    #[arg(long)]
    pub qual: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            f.exit_code()
        }
    }
}
