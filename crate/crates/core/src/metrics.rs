//! The thirteen sentence-pair metrics behind a polarity-aware registry.
//!
//! Every metric scores one pair at a time. Similarity metrics grow with
//! semantic closeness, distance metrics shrink; downstream analysis
//! normalizes via [`Polarity`]. Metrics that depend on embeddings can yield
//! a missing value for a pair (for example when every token is
//! out-of-vocabulary); missing values are tracked, not silently dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Study;
use crate::embeddings::{ContextualPairVectors, EmbeddingError, EmbeddingTable};
use crate::textproc::{tokenize, NounLexicon, SynonymMap, TextError};
use crate::transport::TransportError;

mod embedding;
mod lexical;

pub use embedding::{bert_score, cosine_static, elmo_l2, pos_distance, wmd};
pub use lexical::{bleu, chrf, meteor, rouge_l, rouge_n, word_overlap, RougeMode};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("token sequence is empty")]
    EmptySequence,
    #[error("reference has {got} tokens; rouge_{order} needs at least {order}")]
    ReferenceTooShort { order: usize, got: usize },
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("unknown metric {name:?}; known metrics: {known}")]
    UnknownMetric { name: String, known: String },
    #[error("metric {metric} needs resource {resource}")]
    MissingResource { metric: String, resource: String },
    #[error("metric {metric}: bad parameter {param}: {msg}")]
    BadParam {
        metric: String,
        param: String,
        msg: String,
    },
    #[error("pair {pair_id}: sentence vectors absent")]
    MissingSentenceVectors { pair_id: String },
    #[error("pair {pair_id}: token vectors absent")]
    MissingTokenVectors { pair_id: String },
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Whether larger values mean closer meaning (similarity) or farther
/// (distance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Similarity,
    Distance,
}

impl Polarity {
    /// Map a raw score so that larger always means more similar.
    pub fn normalize(self, value: f64) -> f64 {
        match self {
            Polarity::Similarity => value,
            Polarity::Distance => -value,
        }
    }
}

/// A typed metric parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Int(i64),
    Real(f64),
    Text(String),
}

impl ParamValue {
    fn as_usize(&self) -> Option<usize> {
        match self {
            ParamValue::Int(i) if *i >= 0 => Some(*i as usize),
            _ => None,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Real(x) => Some(*x),
            ParamValue::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// Metric identity, polarity, and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDescriptor {
    pub name: String,
    pub polarity: Polarity,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

impl MetricDescriptor {
    fn usize_param(&self, key: &str, default: usize) -> Result<usize, MetricError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_usize().ok_or_else(|| MetricError::BadParam {
                metric: self.name.clone(),
                param: key.to_string(),
                msg: "expected a non-negative integer".into(),
            }),
        }
    }

    fn f64_param(&self, key: &str, default: f64) -> Result<f64, MetricError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| MetricError::BadParam {
                metric: self.name.clone(),
                param: key.to_string(),
                msg: "expected a number".into(),
            }),
        }
    }

    fn str_param(&self, key: &str, default: &str) -> Result<String, MetricError> {
        match self.params.get(key) {
            None => Ok(default.to_string()),
            Some(v) => v
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| MetricError::BadParam {
                    metric: self.name.clone(),
                    param: key.to_string(),
                    msg: "expected a string".into(),
                }),
        }
    }
}

/// All registered metric names, in registry order.
pub const METRIC_NAMES: [&str; 13] = [
    "pos_distance",
    "word_overlap",
    "chrf",
    "cosine_w2v",
    "cosine_fasttext",
    "elmo_l2",
    "wmd",
    "bleu",
    "rouge_1",
    "rouge_2",
    "rouge_l",
    "meteor",
    "bert_score",
];

/// Fixed polarity for a registered metric name.
pub fn polarity_of(name: &str) -> Option<Polarity> {
    match name {
        "word_overlap" | "chrf" | "bleu" | "rouge_1" | "rouge_2" | "rouge_l" | "meteor"
        | "bert_score" => Some(Polarity::Similarity),
        "pos_distance" | "cosine_w2v" | "cosine_fasttext" | "wmd" | "elmo_l2" => {
            Some(Polarity::Distance)
        }
        _ => None,
    }
}

/// Descriptor with default parameters for a registered metric.
pub fn descriptor(name: &str) -> Result<MetricDescriptor, MetricError> {
    let polarity = polarity_of(name).ok_or_else(|| MetricError::UnknownMetric {
        name: name.to_string(),
        known: METRIC_NAMES.join(", "),
    })?;
    let mut params = BTreeMap::new();
    match name {
        "chrf" => {
            params.insert("max_n".into(), ParamValue::Int(6));
            params.insert("beta".into(), ParamValue::Real(2.0));
        }
        "bleu" => {
            params.insert("max_n".into(), ParamValue::Int(4));
        }
        "rouge_1" => {
            params.insert("n".into(), ParamValue::Int(1));
            params.insert("mode".into(), ParamValue::Text("recall".into()));
        }
        "rouge_2" => {
            params.insert("n".into(), ParamValue::Int(2));
            params.insert("mode".into(), ParamValue::Text("recall".into()));
        }
        "cosine_w2v" => {
            params.insert("table".into(), ParamValue::Text("w2v".into()));
        }
        "cosine_fasttext" => {
            params.insert("table".into(), ParamValue::Text("fasttext".into()));
        }
        "wmd" | "pos_distance" => {
            params.insert("table".into(), ParamValue::Text("w2v".into()));
        }
        _ => {}
    }
    Ok(MetricDescriptor {
        name: name.to_string(),
        polarity,
        params,
    })
}

/// The full registry of thirteen metrics with default parameters.
pub fn default_registry() -> Vec<MetricDescriptor> {
    METRIC_NAMES
        .iter()
        .map(|n| descriptor(n).expect("registered name"))
        .collect()
}

/// One metric value for one pair; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub pair_id: String,
    pub metric: String,
    pub value: Option<f64>,
}

/// Immutable resources a metric evaluation may need.
#[derive(Default)]
pub struct MetricResources<'a> {
    pub tables: BTreeMap<String, &'a EmbeddingTable>,
    pub contextual: Option<&'a BTreeMap<String, ContextualPairVectors>>,
    pub lexicon: Option<&'a NounLexicon>,
    pub synonyms: Option<&'a SynonymMap>,
}

impl<'a> MetricResources<'a> {
    fn table(&self, metric: &MetricDescriptor) -> Result<&'a EmbeddingTable, MetricError> {
        let name = metric.str_param("table", "w2v")?;
        self.tables
            .get(&name)
            .copied()
            .ok_or_else(|| MetricError::MissingResource {
                metric: metric.name.clone(),
                resource: format!("embedding table {name:?}"),
            })
    }

    fn contextual(
        &self,
        metric: &MetricDescriptor,
    ) -> Result<&'a BTreeMap<String, ContextualPairVectors>, MetricError> {
        self.contextual.ok_or_else(|| MetricError::MissingResource {
            metric: metric.name.clone(),
            resource: "contextual vector file".into(),
        })
    }

    fn lexicon(&self, metric: &MetricDescriptor) -> Result<&'a NounLexicon, MetricError> {
        self.lexicon.ok_or_else(|| MetricError::MissingResource {
            metric: metric.name.clone(),
            resource: "noun lexicon".into(),
        })
    }
}

/// Check that every requested metric has the resources it needs, without
/// scoring anything.
pub fn validate_resources(
    registry: &[MetricDescriptor],
    res: &MetricResources,
) -> Result<(), MetricError> {
    for metric in registry {
        if polarity_of(&metric.name).is_none() {
            return Err(MetricError::UnknownMetric {
                name: metric.name.clone(),
                known: METRIC_NAMES.join(", "),
            });
        }
        match metric.name.as_str() {
            "cosine_w2v" | "cosine_fasttext" | "wmd" => {
                res.table(metric)?;
            }
            "pos_distance" => {
                res.table(metric)?;
                res.lexicon(metric)?;
            }
            "elmo_l2" | "bert_score" => {
                res.contextual(metric)?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// Options applying to the whole scoring run.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScoreOptions {
    /// Average directional metrics over both argument orders.
    pub symmetrize: bool,
}

/// The per-pair score grid keyed by (metric, dataset).
#[derive(Debug, Default)]
pub struct ScoreGrid {
    pub cells: BTreeMap<(String, String), Vec<PairScore>>,
}

impl ScoreGrid {
    pub fn scores(&self, metric: &str, dataset_id: &str) -> Option<&[PairScore]> {
        self.cells
            .get(&(metric.to_string(), dataset_id.to_string()))
            .map(Vec::as_slice)
    }
}

/// Score one pair of texts with one metric.
///
/// `Ok(None)` marks a missing value: an all-out-of-vocabulary side for
/// embedding metrics, a pair absent from the contextual file, no embeddable
/// noun for the noun distance, or a reference shorter than the n-gram order.
/// Hard errors are reserved for unusable inputs and resources.
pub fn score_pair(
    metric: &MetricDescriptor,
    text_a: &str,
    text_b: &str,
    pair_id: &str,
    res: &MetricResources,
    opts: ScoreOptions,
) -> Result<Option<f64>, MetricError> {
    let reference = tokenize(text_a)?;
    let candidate = tokenize(text_b)?;
    match metric.name.as_str() {
        "word_overlap" => word_overlap(&reference, &candidate).map(Some),
        "chrf" => {
            let max_n = metric.usize_param("max_n", 6)?;
            let beta = metric.f64_param("beta", 2.0)?;
            chrf(text_a, text_b, max_n, beta).map(Some)
        }
        "bleu" => {
            let max_n = metric.usize_param("max_n", 4)?;
            let forward = bleu(&candidate, &reference, max_n)?;
            if opts.symmetrize {
                let backward = bleu(&reference, &candidate, max_n)?;
                Ok(Some((forward + backward) / 2.0))
            } else {
                Ok(Some(forward))
            }
        }
        "rouge_1" | "rouge_2" => {
            let order = metric.usize_param("n", if metric.name == "rouge_1" { 1 } else { 2 })?;
            let mode = match metric.str_param("mode", "recall")?.as_str() {
                "recall" => RougeMode::Recall,
                "f1" => RougeMode::F1,
                other => {
                    return Err(MetricError::BadParam {
                        metric: metric.name.clone(),
                        param: "mode".into(),
                        msg: format!("unknown mode {other:?}"),
                    })
                }
            };
            let forward = rouge_n(&candidate, &reference, order, mode);
            let score = if opts.symmetrize {
                match (forward, rouge_n(&reference, &candidate, order, mode)) {
                    (Ok(f), Ok(b)) => Ok((f + b) / 2.0),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                }
            } else {
                forward
            };
            match score {
                Ok(v) => Ok(Some(v)),
                Err(MetricError::ReferenceTooShort { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        }
        "rouge_l" => {
            let forward = rouge_l(&candidate, &reference)?;
            if opts.symmetrize {
                let backward = rouge_l(&reference, &candidate)?;
                Ok(Some((forward + backward) / 2.0))
            } else {
                Ok(Some(forward))
            }
        }
        "meteor" => {
            let forward = meteor(&candidate, &reference, res.synonyms)?;
            if opts.symmetrize {
                let backward = meteor(&reference, &candidate, res.synonyms)?;
                Ok(Some((forward + backward) / 2.0))
            } else {
                Ok(Some(forward))
            }
        }
        "cosine_w2v" | "cosine_fasttext" => {
            cosine_static(&reference, &candidate, res.table(metric)?)
        }
        "wmd" => wmd(&reference, &candidate, res.table(metric)?),
        "pos_distance" => pos_distance(
            &reference,
            &candidate,
            res.lexicon(metric)?,
            res.table(metric)?,
        ),
        "elmo_l2" => match res.contextual(metric)?.get(pair_id) {
            None => Ok(None),
            Some(vecs) if vecs.sent_a.is_none() || vecs.sent_b.is_none() => Ok(None),
            Some(vecs) => elmo_l2(vecs).map(Some),
        },
        "bert_score" => match res.contextual(metric)?.get(pair_id) {
            None => Ok(None),
            Some(vecs) if vecs.vecs_a.is_empty() || vecs.vecs_b.is_empty() => Ok(None),
            Some(vecs) => bert_score(vecs, None).map(Some),
        },
        other => Err(MetricError::UnknownMetric {
            name: other.to_string(),
            known: METRIC_NAMES.join(", "),
        }),
    }
}

/// Score every registered metric over every dataset of the study.
///
/// Resources are validated up front; nothing is scored if any metric lacks
/// what it needs. The grid is complete: every (metric, dataset, pair) slot
/// holds a [`PairScore`], with `value: None` for missing values.
pub fn compute_all(
    study: &Study,
    registry: &[MetricDescriptor],
    res: &MetricResources,
    opts: ScoreOptions,
) -> Result<ScoreGrid, MetricError> {
    validate_resources(registry, res)?;
    let mut grid = ScoreGrid::default();
    for metric in registry {
        for dataset in study.datasets() {
            let mut scores = Vec::with_capacity(dataset.len());
            for pair in dataset.pairs() {
                let value = score_pair(
                    metric,
                    pair.text_a(),
                    pair.text_b(),
                    pair.pair_id(),
                    res,
                    opts,
                )?;
                scores.push(PairScore {
                    pair_id: pair.pair_id().to_string(),
                    metric: metric.name.clone(),
                    value,
                });
            }
            grid.cells.insert(
                (metric.name.clone(), dataset.dataset_id().to_string()),
                scores,
            );
        }
    }
    Ok(grid)
}
