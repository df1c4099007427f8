//! `medrel` — batch pipeline for drug-attribute relation extraction:
//! corpus validation, synthetic data generation, rule-based extraction,
//! CNN training/prediction, and P/R/F1 scoring.
//!
//! Exit codes: 0 success, 1 internal error, 2 bad input.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "medrel", version, about)]
struct Cli {
    /// JSON config file; flags override config values ($MEDREL_CONFIG names
    /// a default).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strict-parse a corpus directory and print entity/relation counts.
    Validate(ValidateArgs),
    /// Generate a deterministic synthetic corpus (plus optional embeddings).
    Synth(SynthArgs),
    /// Run the co-location rule extractor and write predicted relations.
    ExtractRules(ExtractRulesArgs),
    /// Export labeled candidate pairs as TSV.
    GenCandidates(GenCandidatesArgs),
    /// Train CNN relation classifiers (one model per relation type).
    Train(TrainArgs),
    /// Predict relations with trained model checkpoints.
    Predict(PredictArgs),
    /// Score predicted relations against a gold corpus.
    Score(ScoreArgs),
    /// Render a saved score report.
    Report(ReportArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Directory of paired <id>.txt / <id>.ann files.
    corpus: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the generated corpus.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    docs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sentences_min: Option<usize>,
    #[arg(long)]
    sentences_max: Option<usize>,
    /// Probability (applied to every relation type) that the drug precedes
    /// its attribute; omit to keep the per-type defaults.
    #[arg(long)]
    p_drug_first: Option<f64>,
    #[arg(long)]
    p_multi_drug: Option<f64>,
    #[arg(long)]
    p_cross_sentence: Option<f64>,
    /// Insert distractor drugs next to attributes at this rate after
    /// generation.
    #[arg(long)]
    distractor_rate: Option<f64>,
    /// Also write a random embedding file covering the corpus vocabulary.
    #[arg(long)]
    emit_embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    embedding_dim: usize,
}

#[derive(Args)]
struct ExtractRulesArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Parent directory for the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run directory name (default: UTC timestamp).
    #[arg(long)]
    run_name: Option<String>,
    /// left-only | right-only | left-then-right | right-then-left.
    #[arg(long)]
    mechanism: Option<String>,
    /// bounded | unbounded.
    #[arg(long)]
    mode: Option<String>,
    /// Per-type mechanism override, e.g. "ADE-Drug=left-then-right"
    /// (repeatable).
    #[arg(long = "override", value_name = "RTYPE=MECHANISM")]
    overrides: Vec<String>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Error on surface mismatches and unknown entity types instead of
    /// warning (the default tolerates them).
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct GenCandidatesArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    run_name: Option<String>,
    /// A relation type name or "all".
    #[arg(long, default_value = "all")]
    rtype: String,
    #[arg(long)]
    max_cross: Option<usize>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    run_name: Option<String>,
    /// A relation type name or "all".
    #[arg(long, default_value = "all")]
    rtype: String,
    /// sentence | segment.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    max_cross: Option<usize>,
    #[arg(long)]
    window_len: Option<usize>,
    /// Five comma-separated segment lengths.
    #[arg(long, value_delimiter = ',')]
    segment_lens: Option<Vec<usize>>,
    /// Comma-separated convolution kernel widths.
    #[arg(long, value_delimiter = ',')]
    kernel_widths: Option<Vec<usize>>,
    #[arg(long)]
    filters: Option<usize>,
    #[arg(long)]
    trainable_embeddings: bool,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Model checkpoint (repeatable for several relation types).
    #[arg(long = "model", required = true)]
    models: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    run_name: Option<String>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    max_cross: Option<usize>,
    /// Also write per-class (relation / no-relation) reports against gold
    /// labels.
    #[arg(long)]
    class_report: bool,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Gold corpus directory (txt + ann).
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Directory of predicted .ann files (R lines over gold entity ids).
    #[arg(long)]
    pred: Option<PathBuf>,
    /// table | json | tsv.
    #[arg(long, default_value = "table")]
    format: String,
    /// Optional parent directory to store report.json in a run directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    run_name: Option<String>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.json produced by `score`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "table")]
    format: String,
}

// Die quietly on SIGPIPE (e.g. `medrel validate corpus | head`) instead of
// panicking on a failed stdout write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    let file_config = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    };
    let result = match cli.command {
        Command::Validate(args) => commands::validate(args, &file_config),
        Command::Synth(args) => commands::synth(args, &file_config),
        Command::ExtractRules(args) => commands::extract_rules(args, &file_config),
        Command::GenCandidates(args) => commands::gen_candidates(args, &file_config),
        Command::Train(args) => commands::train(args, &file_config),
        Command::Predict(args) => commands::predict(args, &file_config),
        Command::Score(args) => commands::score(args, &file_config),
        Command::Report(args) => commands::report(args),
    };
    match result {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            std::process::exit(failure.code);
        }
    }
}
