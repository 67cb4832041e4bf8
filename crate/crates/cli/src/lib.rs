//! `motifgnn` command-line interface.
//!
//! Each subcommand reads a flat `key = value` config (`--config`), applies
//! `--set key=value` overrides and then its own flags, and writes the
//! resolved settings to `config.resolved` in the output directory.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config keys or missing inputs.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] motifgnn::Error),
    /// The command ran but did not succeed; outputs may have been written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(motifgnn::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "motifgnn", version, about = "Motif-based multi-view graph attention for node classification")]
pub struct Cli {
    /// Worker threads for census and per-view work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Base {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct MotifArgs {
    /// Motif classes: `all`, `none` or a list such as `1,4-7`.
    #[arg(long)]
    pub motifs: Option<String>,
    /// `pair_cooccurrence` or `edge_preserving`.
    #[arg(long)]
    pub semantics: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count motif instances and report per-class edge retention.
    Census {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        motif: MotifArgs,
        /// Include per-node participation vectors.
        #[arg(long)]
        participation: bool,
        /// Use the all-triples enumeration (small graphs only).
        #[arg(long)]
        brute_force: bool,
    },
    /// Write motif adjacencies as `motif_<k>.tsv` edge lists.
    Build {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        motif: MotifArgs,
    },
    /// Train a model and write its snapshot and metrics.
    Train {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[command(flatten)]
        motif: MotifArgs,
        /// Number of consecutive seeds to train, starting at `seed`.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        /// `binary` or `multiclass`.
        #[arg(long)]
        task: Option<String>,
        /// `plain-gat`, `no-gate` or `no-curriculum`.
        #[arg(long)]
        ablate: Option<String>,
    },
    /// Evaluate a saved snapshot.
    Eval {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Bad-rate lift and heterophily of the original and motif graphs.
    Analyze {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[command(flatten)]
        motif: MotifArgs,
    },
    /// Generate a planted-motif dataset.
    Synth {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        signal: Option<f64>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failed(format!("cannot start worker pool: {e}")))?;
    pool.install(|| commands::dispatch(cli.command))
}
