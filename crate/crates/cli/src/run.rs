//! Command implementations: resource loading, scoring, evaluation outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use semsim_core::analysis::{build_report, summarize, ComparisonReport, DatasetSummary};
use semsim_core::corpus::{
    aggregate_human, generate_random_pairs, load_study, sample_pairs, save_pairs, ManifestEntry,
    PairDataset, Study,
};
use semsim_core::embeddings::{load_contextual, load_table, ContextualPairVectors, EmbeddingTable};
use semsim_core::metrics::{
    compute_all, validate_resources, MetricDescriptor, MetricResources, ScoreGrid, ScoreOptions,
};
use semsim_core::textproc::{NounLexicon, SynonymMap};

use crate::config::{build_registry, check_paths, config_hash, ConfigError, RunConfig};

/// All loaded resources, owned for the duration of a run.
pub struct Resources {
    tables: BTreeMap<String, EmbeddingTable>,
    contextual: Option<BTreeMap<String, ContextualPairVectors>>,
    lexicon: Option<NounLexicon>,
    synonyms: Option<SynonymMap>,
}

impl Resources {
    pub fn load(config: &RunConfig) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for (name, path) in &config.embeddings {
            let load = load_table(path, name)
                .with_context(|| format!("loading embedding table {name}"))?;
            for w in &load.warnings {
                eprintln!("warning: {name}: {w}");
            }
            tables.insert(name.clone(), load.table);
        }
        let contextual = config
            .contextual
            .as_deref()
            .map(load_contextual)
            .transpose()
            .context("loading contextual vectors")?;
        let lexicon = config
            .lexicon
            .as_deref()
            .map(NounLexicon::load)
            .transpose()
            .context("loading noun lexicon")?;
        let synonyms = config
            .synonyms
            .as_deref()
            .map(SynonymMap::load)
            .transpose()
            .context("loading synonym map")?;
        Ok(Self {
            tables,
            contextual,
            lexicon,
            synonyms,
        })
    }

    pub fn metric_resources(&self) -> MetricResources<'_> {
        MetricResources {
            tables: self.tables.iter().map(|(k, v)| (k.clone(), v)).collect(),
            contextual: self.contextual.as_ref(),
            lexicon: self.lexicon.as_ref(),
            synonyms: self.synonyms.as_ref(),
        }
    }
}

fn load_study_checked(config: &RunConfig) -> Result<Study> {
    let manifest = config
        .manifest
        .as_deref()
        .ok_or_else(|| ConfigError("a study manifest is required".into()))?;
    let (study, warnings) = load_study(manifest)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(study)
}

/// Subsample each dataset to `sample_n` pairs where applicable. Datasets at
/// or below the target are kept whole.
fn apply_sampling(study: Study, config: &RunConfig) -> Result<Study> {
    let Some(n) = config.sample_n else {
        return Ok(study);
    };
    let metadata = study.metadata().clone();
    let mut datasets = Vec::new();
    for dataset in study.datasets() {
        if dataset.len() <= n {
            if dataset.len() < n {
                eprintln!(
                    "note: {} has {} pairs, below sample size {n}; keeping all",
                    dataset.dataset_id(),
                    dataset.len()
                );
            }
            datasets.push(dataset.clone());
        } else {
            let sampled = sample_pairs(dataset, n, config.seed)?;
            datasets.push(PairDataset::new(
                dataset.dataset_id(),
                dataset.kind(),
                sampled.pairs().to_vec(),
                dataset.source_dataset_id().map(str::to_string),
            )?);
        }
    }
    Ok(Study::new(datasets, metadata)?)
}

fn prepare(config: &RunConfig) -> Result<(Study, Vec<MetricDescriptor>, Resources)> {
    check_paths(config, true)?;
    let registry = build_registry(config)?;
    let study = apply_sampling(load_study_checked(config)?, config)?;
    let resources = Resources::load(config)?;
    validate_resources(&registry, &resources.metric_resources())
        .map_err(|e| ConfigError(e.to_string()))?;
    Ok((study, registry, resources))
}

fn csv_writer(path: &Path, hash: &str) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file =
        fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    writeln!(file, "# config_hash={hash}")?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "NA".to_string(),
    }
}

fn write_scores_csv(path: &Path, hash: &str, grid: &ScoreGrid) -> Result<()> {
    let mut w = csv_writer(path, hash)?;
    w.write_record(["metric", "dataset_id", "pair_id", "value"])?;
    for ((metric, dataset_id), scores) in &grid.cells {
        let mut sorted: Vec<_> = scores.iter().collect();
        sorted.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        for s in sorted {
            w.write_record([metric, dataset_id, &s.pair_id, &fmt_opt(s.value)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn dataset_kind_label(study: &Study, dataset_id: &str) -> &'static str {
    match study.dataset(dataset_id).map(|d| d.kind()) {
        Some(semsim_core::corpus::DatasetKind::Paraphrase) => "paraphrase",
        Some(semsim_core::corpus::DatasetKind::StyleTransfer) => "style_transfer",
        Some(semsim_core::corpus::DatasetKind::Random) => "random",
        None => "unknown",
    }
}

fn write_summaries_csv(
    path: &Path,
    hash: &str,
    study: &Study,
    registry: &[MetricDescriptor],
    grid: &ScoreGrid,
) -> Result<Vec<DatasetSummary>> {
    let mut w = csv_writer(path, hash)?;
    w.write_record([
        "metric",
        "dataset_id",
        "kind",
        "mean",
        "std",
        "n_scored",
        "n_missing",
    ])?;
    // Human labels first, mirroring the leading human column of the score
    // tables; metric rows follow in registry order.
    for dataset in study.datasets() {
        match aggregate_human(dataset) {
            Ok(agg) => w.write_record([
                "human",
                dataset.dataset_id(),
                dataset_kind_label(study, dataset.dataset_id()),
                &format!("{}", agg.mean),
                &format!("{}", agg.std),
                &format!("{}", agg.n),
                "0",
            ])?,
            Err(e) => eprintln!("warning: human labels for {}: {e}", dataset.dataset_id()),
        }
    }
    let mut summaries = Vec::new();
    for metric in registry {
        for dataset in study.datasets() {
            let id = dataset.dataset_id();
            let Some(scores) = grid.scores(&metric.name, id) else {
                continue;
            };
            match summarize(&metric.name, id, scores) {
                Ok(s) => {
                    w.write_record([
                        s.metric.as_str(),
                        s.dataset_id.as_str(),
                        dataset_kind_label(study, id),
                        &format!("{}", s.mean),
                        &format!("{}", s.std),
                        &format!("{}", s.n_scored),
                        &format!("{}", s.n_missing),
                    ])?;
                    summaries.push(s);
                }
                Err(e) => eprintln!("warning: {} on {id}: {e}", metric.name),
            }
        }
    }
    w.flush()?;
    Ok(summaries)
}

fn write_metric_human_csv(path: &Path, hash: &str, report: &ComparisonReport) -> Result<()> {
    let mut w = csv_writer(path, hash)?;
    w.write_record([
        "metric",
        "pearson_with_human",
        "abs_pearson_with_human",
        "pearson_pair_level",
        "order_corr_with_human",
        "order_tau_with_human",
        "variability",
    ])?;
    for m in &report.metrics {
        w.write_record([
            m.metric.as_str(),
            &fmt_opt(m.pearson_with_human),
            &fmt_opt(m.pearson_with_human.map(f64::abs)),
            &fmt_opt(m.pearson_pair_level),
            &fmt_opt(m.order_corr_with_human),
            &fmt_opt(m.order_tau_with_human),
            &fmt_opt(m.variability),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_order_scores_csv(path: &Path, hash: &str, report: &ComparisonReport) -> Result<()> {
    let mut w = csv_writer(path, hash)?;
    w.write_record([
        "metric",
        "rank_coincidence",
        "swap_count",
        "inequality_violations",
    ])?;
    for m in &report.metrics {
        let violations = m
            .inequality_violations
            .as_ref()
            .map(|v| format!("{}", v.len()))
            .unwrap_or_else(|| "NA".to_string());
        w.write_record([
            m.metric.as_str(),
            &m.rank_coincidence
                .map(|c| c.to_string())
                .unwrap_or_else(|| "NA".into()),
            &m.swap_count
                .map(|c| c.to_string())
                .unwrap_or_else(|| "NA".into()),
            &violations,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_order_matrix_csv(path: &Path, hash: &str, report: &ComparisonReport) -> Result<()> {
    let mut w = csv_writer(path, hash)?;
    let mut header = vec!["metric".to_string()];
    header.extend(report.metric_names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in report.metric_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(report.order_corr_matrix[i].iter().map(|v| format!("{v}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_report_json(path: &Path, hash: &str, report: &ComparisonReport) -> Result<()> {
    let mut value = serde_json::to_value(report)?;
    value
        .as_object_mut()
        .expect("report serializes to an object")
        .insert("config_hash".into(), serde_json::Value::String(hash.into()));
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &value)?;
    writeln!(file)?;
    Ok(())
}

/// `score`: per-pair scores for every selected metric, as CSV.
pub fn cmd_score(config: &RunConfig) -> Result<()> {
    let hash = config_hash(config);
    let (study, registry, resources) = prepare(config)?;
    let grid = compute_all(
        &study,
        &registry,
        &resources.metric_resources(),
        ScoreOptions {
            symmetrize: config.symmetrize,
        },
    )?;
    let path = config.out_dir.join("scores.csv");
    write_scores_csv(&path, &hash, &grid)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `evaluate`: summaries, the comparison report, and the order matrix.
pub fn cmd_evaluate(config: &RunConfig) -> Result<()> {
    let hash = config_hash(config);
    let (study, registry, resources) = prepare(config)?;
    study
        .validate_for_analysis()
        .map_err(|e| ConfigError(e.to_string()))?;
    let grid = compute_all(
        &study,
        &registry,
        &resources.metric_resources(),
        ScoreOptions {
            symmetrize: config.symmetrize,
        },
    )?;
    let out = &config.out_dir;
    write_scores_csv(&out.join("scores.csv"), &hash, &grid)?;
    write_summaries_csv(&out.join("summaries.csv"), &hash, &study, &registry, &grid)?;
    let report = build_report(&study, &grid, &registry)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_metric_human_csv(&out.join("metric_human.csv"), &hash, &report)?;
    write_order_scores_csv(&out.join("order_scores.csv"), &hash, &report)?;
    write_order_matrix_csv(&out.join("order_matrix.csv"), &hash, &report)?;
    write_report_json(&out.join("report.json"), &hash, &report)?;
    for name in [
        "scores.csv",
        "summaries.csv",
        "metric_human.csv",
        "order_scores.csv",
        "order_matrix.csv",
        "report.json",
    ] {
        println!("wrote {}", out.join(name).display());
    }
    Ok(())
}

fn find_dataset<'a>(study: &'a Study, id: &str) -> Result<&'a PairDataset> {
    study.dataset(id).ok_or_else(|| {
        ConfigError(format!(
            "dataset {id:?} not in manifest; available: {}",
            study
                .datasets()
                .iter()
                .map(|d| d.dataset_id())
                .collect::<Vec<_>>()
                .join(", ")
        ))
        .into()
    })
}

/// `random-pairs`: build a random-pair benchmark dataset from one dataset of
/// the study and print a manifest snippet for it.
pub fn cmd_random_pairs(config: &RunConfig, dataset_id: &str, n: usize) -> Result<PathBuf> {
    check_paths(config, true)?;
    let study = load_study_checked(config)?;
    let source = find_dataset(&study, dataset_id)?;
    let random = generate_random_pairs(source, n, config.seed).map_err(|e| match e {
        e @ semsim_core::corpus::CorpusError::InsufficientCandidates { .. } => {
            anyhow::Error::from(ConfigError(e.to_string()))
        }
        other => other.into(),
    })?;
    fs::create_dir_all(&config.out_dir)?;
    let path = config
        .out_dir
        .join(format!("{}.jsonl", random.dataset_id()));
    save_pairs(random.pairs(), &path)?;
    let snippet = ManifestEntry {
        dataset_id: random.dataset_id().to_string(),
        kind: random.kind(),
        path: path.clone(),
        source_dataset_id: random.source_dataset_id().map(str::to_string),
        format: None,
    };
    println!("{}", serde_json::to_string_pretty(&snippet)?);
    Ok(path)
}

/// `sample`: uniform subsample of one dataset, written as JSON Lines.
pub fn cmd_sample(config: &RunConfig, dataset_id: &str, n: usize) -> Result<PathBuf> {
    check_paths(config, true)?;
    let study = load_study_checked(config)?;
    let source = find_dataset(&study, dataset_id)?;
    if n > source.len() {
        bail!(ConfigError(format!(
            "sample size {n} exceeds dataset size {}",
            source.len()
        )));
    }
    let sampled = sample_pairs(source, n, config.seed)?;
    fs::create_dir_all(&config.out_dir)?;
    let path = config
        .out_dir
        .join(format!("{}.jsonl", sampled.dataset_id()));
    save_pairs(sampled.pairs(), &path)?;
    println!("wrote {}", path.display());
    Ok(path)
}
