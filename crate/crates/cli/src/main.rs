//! `semsim`: score sentence-pair datasets with a family of semantic
//! similarity metrics and compare the metrics against human judgment.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod config;
mod run;

use config::{load_config, ConfigError, Overrides};

#[derive(Parser)]
#[command(
    name = "semsim",
    version,
    about = "Semantic similarity metrics and order-based metric comparison for sentence-pair datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Study manifest listing the datasets.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Deterministic seed for sampling and random-pair construction.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated metric names (defaults to the config selection).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Subsample every dataset to this many pairs before scoring.
    #[arg(long)]
    sample_n: Option<usize>,
    /// Average directional metrics over both argument orders.
    #[arg(long)]
    symmetrize: bool,
    /// Embedding table as name=path (repeatable), e.g. w2v=vectors.txt.
    #[arg(long = "embedding", value_parser = parse_named_path)]
    embeddings: Vec<(String, PathBuf)>,
    /// Contextual vector file (JSON Lines).
    #[arg(long)]
    contextual: Option<PathBuf>,
    /// Noun lexicon file, one word per line.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Synonym map file (JSON Lines).
    #[arg(long)]
    synonyms: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DatasetArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dataset id from the manifest.
    #[arg(long)]
    dataset: String,
    /// Number of pairs to produce.
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute per-pair metric scores and write scores.csv.
    Score(ScoreArgs),
    /// Score, summarize, and write the full metric comparison report.
    Evaluate(ScoreArgs),
    /// Build a random-pair benchmark dataset from one dataset.
    RandomPairs(DatasetArgs),
    /// Uniformly subsample one dataset.
    Sample(DatasetArgs),
}

fn parse_named_path(raw: &str) -> Result<(String, PathBuf), String> {
    match raw.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected name=path, got {raw:?}")),
    }
}

fn overrides_from(args: &ScoreArgs) -> Overrides {
    Overrides {
        manifest: args.common.manifest.clone(),
        metrics: args.metrics.clone(),
        embeddings: args.embeddings.clone(),
        contextual: args.contextual.clone(),
        lexicon: args.lexicon.clone(),
        synonyms: args.synonyms.clone(),
        sample_n: args.sample_n,
        seed: args.common.seed,
        out_dir: args.common.out_dir.clone(),
        symmetrize: args.symmetrize,
    }
}

fn dataset_overrides(args: &DatasetArgs) -> Overrides {
    Overrides {
        manifest: args.common.manifest.clone(),
        seed: args.common.seed,
        out_dir: args.common.out_dir.clone(),
        ..Default::default()
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score(args) => {
            let config = load_config(args.common.config.as_deref(), overrides_from(&args))?;
            run::cmd_score(&config)
        }
        Command::Evaluate(args) => {
            let config = load_config(args.common.config.as_deref(), overrides_from(&args))?;
            run::cmd_evaluate(&config)
        }
        Command::RandomPairs(args) => {
            let config = load_config(args.common.config.as_deref(), dataset_overrides(&args))?;
            run::cmd_random_pairs(&config, &args.dataset, args.n).map(|_| ())
        }
        Command::Sample(args) => {
            let config = load_config(args.common.config.as_deref(), dataset_overrides(&args))?;
            run::cmd_sample(&config, &args.dataset, args.n).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err
                .chain()
                .any(|c| c.downcast_ref::<ConfigError>().is_some());
            if usage {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
