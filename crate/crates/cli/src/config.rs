//! Run configuration: JSON config file plus flag overrides, resolved into a
//! single hashed value so every output can state exactly what produced it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use semsim_core::metrics::{descriptor, MetricDescriptor, ParamValue, METRIC_NAMES};

/// A usage or configuration problem; mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

/// One selected metric, optionally with parameter overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSelection {
    Name(String),
    WithParams {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, ParamValue>,
    },
}

impl MetricSelection {
    pub fn name(&self) -> &str {
        match self {
            MetricSelection::Name(n) => n,
            MetricSelection::WithParams { name, .. } => name,
        }
    }

    fn params(&self) -> BTreeMap<String, ParamValue> {
        match self {
            MetricSelection::Name(_) => BTreeMap::new(),
            MetricSelection::WithParams { params, .. } => params.clone(),
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The resolved configuration of one batch run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub metrics: Vec<MetricSelection>,
    /// Embedding tables by registry name (`w2v`, `fasttext`, ...).
    pub embeddings: BTreeMap<String, PathBuf>,
    pub contextual: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    /// When set, every dataset larger than this is subsampled before
    /// scoring, using `seed`.
    pub sample_n: Option<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub symmetrize: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            metrics: Vec::new(),
            embeddings: BTreeMap::new(),
            contextual: None,
            lexicon: None,
            synonyms: None,
            sample_n: None,
            seed: 0,
            out_dir: default_out_dir(),
            symmetrize: false,
        }
    }
}

/// Flag-level overrides; every set field wins over the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub manifest: Option<PathBuf>,
    pub metrics: Option<Vec<String>>,
    pub embeddings: Vec<(String, PathBuf)>,
    pub contextual: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub sample_n: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub symmetrize: bool,
}

fn resolve(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&path);
    }
}

/// Load the config file (when given), resolve its relative paths against
/// the file's directory, and apply flag overrides (flags win; flag paths
/// stay relative to the working directory).
pub fn load_config(config_path: Option<&Path>, overrides: Overrides) -> Result<RunConfig> {
    let mut config = match config_path {
        None => RunConfig::default(),
        Some(path) => {
            let raw = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            let mut config: RunConfig = serde_json::from_str(&raw)
                .map_err(|e| ConfigError(format!("bad config {}: {e}", path.display())))?;
            let base = path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .to_path_buf();
            if let Some(m) = config.manifest.as_mut() {
                resolve(&base, m);
            }
            for p in config.embeddings.values_mut() {
                resolve(&base, p);
            }
            for p in [
                &mut config.contextual,
                &mut config.lexicon,
                &mut config.synonyms,
            ]
            .into_iter()
            .flatten()
            {
                resolve(&base, p);
            }
            resolve(&base, &mut config.out_dir);
            config
        }
    };
    if let Some(m) = overrides.manifest {
        config.manifest = Some(m);
    }
    if let Some(names) = overrides.metrics {
        config.metrics = names.into_iter().map(MetricSelection::Name).collect();
    }
    for (name, path) in overrides.embeddings {
        config.embeddings.insert(name, path);
    }
    if let Some(p) = overrides.contextual {
        config.contextual = Some(p);
    }
    if let Some(p) = overrides.lexicon {
        config.lexicon = Some(p);
    }
    if let Some(p) = overrides.synonyms {
        config.synonyms = Some(p);
    }
    if let Some(n) = overrides.sample_n {
        config.sample_n = Some(n);
    }
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(d) = overrides.out_dir {
        config.out_dir = d;
    }
    if overrides.symmetrize {
        config.symmetrize = true;
    }
    Ok(config)
}

/// SHA-256 of the canonical JSON serialization of the resolved config.
pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(bytes))
}

/// Build metric descriptors for the selection, with defaults overridden by
/// per-metric params from the config.
pub fn build_registry(config: &RunConfig) -> Result<Vec<MetricDescriptor>> {
    if config.metrics.is_empty() {
        return Err(ConfigError(format!(
            "no metrics selected; known metrics: {}",
            METRIC_NAMES.join(", ")
        ))
        .into());
    }
    let mut registry = Vec::new();
    for selection in &config.metrics {
        let mut desc = descriptor(selection.name()).map_err(|e| ConfigError(e.to_string()))?;
        desc.params.extend(selection.params());
        registry.push(desc);
    }
    Ok(registry)
}

/// Check that every referenced path exists before doing any work.
pub fn check_paths(config: &RunConfig, need_manifest: bool) -> Result<()> {
    let mut missing = Vec::new();
    let mut check = |label: &str, path: &Path| {
        if !path.exists() {
            missing.push(format!("{label}: {}", path.display()));
        }
    };
    match (&config.manifest, need_manifest) {
        (Some(m), _) => check("manifest", m),
        (None, true) => {
            return Err(
                ConfigError("a study manifest is required (--manifest or config)".into()).into(),
            )
        }
        (None, false) => {}
    }
    for (name, path) in &config.embeddings {
        check(&format!("embedding {name}"), path);
    }
    if let Some(p) = &config.contextual {
        check("contextual", p);
    }
    if let Some(p) = &config.lexicon {
        check("lexicon", p);
    }
    if let Some(p) = &config.synonyms {
        check("synonyms", p);
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(ConfigError(format!("missing files:\n  {}", missing.join("\n  "))).into())
    }
}
