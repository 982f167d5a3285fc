//! `imgany`: build banks, run fusions, serve the pipeline.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 I/O or bad
//! config/banks, 4 pipeline failure, 5 decoder failure.

mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imgany_core::{LexiconKind, ModalityTag};

#[derive(Parser)]
#[command(name = "imgany", version, about = "Training-free multi-modal conditioning fusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect embedding banks.
    #[command(subcommand)]
    Bank(BankCommand),
    /// Fuse feature files into a condition bundle.
    Fuse(FuseArgs),
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate deterministic mock inputs for offline runs.
    #[command(subcommand)]
    Mock(MockCommand),
}

#[derive(Subcommand)]
enum BankCommand {
    /// Convert a JSONL lexicon into a bank file.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kind: LexiconKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a bank's header, and optionally its words and keep flags.
    Inspect {
        path: PathBuf,
        #[arg(long)]
        words: bool,
    },
}

#[derive(Args)]
pub struct FuseArgs {
    /// Feature file, or directory of `*.json` feature files. Repeatable.
    #[arg(long, required = true)]
    pub features: Vec<PathBuf>,
    #[arg(long)]
    pub nouns: PathBuf,
    #[arg(long)]
    pub adjectives: PathBuf,
    /// Flat TOML with fusion settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub no_entity: bool,
    #[arg(long)]
    pub no_attribute: bool,
    #[arg(long)]
    pub no_adjective_filter: bool,
    #[arg(long)]
    pub k_entity: Option<usize>,
    #[arg(long)]
    pub k_attribute: Option<usize>,
    #[arg(long)]
    pub variance_threshold: Option<f64>,
    #[arg(long)]
    pub entity_upweight: Option<f64>,
    #[arg(long)]
    pub balanced_weight: Option<f64>,
    /// Bundle output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render the bundle through a remote decoder.
    #[arg(long)]
    pub decode: bool,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_image: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub width: u32,
    #[arg(long, default_value_t = 512)]
    pub height: u32,
    #[arg(long, default_value_t = 50)]
    pub steps: u32,
}

#[derive(Subcommand)]
enum MockCommand {
    /// Write a mock feature file for `text` under `modality`.
    Feature {
        #[arg(long)]
        modality: ModalityTag,
        #[arg(long)]
        text: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a JSONL lexicon of mock-embedded words.
    Lexicon {
        #[arg(long)]
        kind: LexiconKind,
        /// Comma-separated words; generated names when absent.
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        dim: usize,
        /// Adjectives to flag `keep = false`.
        #[arg(long, value_delimiter = ',')]
        drop: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bank(BankCommand::Build { input, kind, out }) => commands::bank_build(&input, kind, &out),
        Command::Bank(BankCommand::Inspect { path, words }) => commands::bank_inspect(&path, words),
        Command::Fuse(args) => commands::fuse(&args),
        Command::Serve { config } => commands::serve(&config),
        Command::Mock(MockCommand::Feature { modality, text, dim, out }) => {
            commands::mock_feature(modality, &text, dim, out.as_deref())
        }
        Command::Mock(MockCommand::Lexicon { kind, words, count, dim, drop, out }) => {
            commands::mock_lexicon(kind, words, count, dim, &drop, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imgany: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
