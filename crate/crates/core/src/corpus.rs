//! Sentence-pair datasets: the data model, file I/O, human-label
//! aggregation, deterministic subsampling, and construction of random-pair
//! benchmark datasets.
//!
//! All types are immutable after construction. Randomized operations are
//! pure functions of `(input, seed)` via [`crate::rng::SplitMix64`].

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{select_indices, SplitMix64};

/// Human scores are integers on a 1..=5 scale.
pub const SCORE_MIN: i64 = 1;
pub const SCORE_MAX: i64 = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed row: {msg}")]
    MalformedRow { line: usize, msg: String },
    #[error("pair {pair_id}: text {side} is empty after trimming")]
    EmptyText { pair_id: String, side: char },
    #[error("pair {pair_id}: score {score} outside [{SCORE_MIN},{SCORE_MAX}]")]
    ScoreOutOfRange { pair_id: String, score: i64 },
    #[error("duplicate pair id {0}")]
    DuplicatePairId(String),
    #[error("duplicate dataset id {0}")]
    DuplicateDatasetId(String),
    #[error("random dataset {0} is missing its source dataset id")]
    MissingSource(String),
    #[error("pairs without human scores: {}", .0.join(", "))]
    MissingScores(Vec<String>),
    #[error("requested {requested} pairs but only {available} are available")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("cannot build {requested} admissible random pairs; at most {achievable} exist")]
    InsufficientCandidates { requested: usize, achievable: usize },
    #[error("dataset {0} has fewer than 2 pairs; cannot cross sentences")]
    TooFewPairs(String),
    #[error("study has no non-random dataset")]
    NoNonRandomDataset,
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("tsv column {col} missing on line {line}")]
    MissingColumn { col: usize, line: usize },
}

/// What a dataset's pairs are supposed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Paraphrase,
    StyleTransfer,
    Random,
}

impl DatasetKind {
    pub fn is_random(self) -> bool {
        matches!(self, DatasetKind::Random)
    }
}

/// Two texts plus any human similarity annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePair {
    pair_id: String,
    text_a: String,
    text_b: String,
    human_scores: Vec<i64>,
    mean_human: Option<f64>,
}

impl SentencePair {
    pub fn new(
        pair_id: &str,
        text_a: &str,
        text_b: &str,
        human_scores: Vec<i64>,
    ) -> Result<Self, CorpusError> {
        if text_a.trim().is_empty() {
            return Err(CorpusError::EmptyText {
                pair_id: pair_id.to_string(),
                side: 'a',
            });
        }
        if text_b.trim().is_empty() {
            return Err(CorpusError::EmptyText {
                pair_id: pair_id.to_string(),
                side: 'b',
            });
        }
        if let Some(&bad) = human_scores
            .iter()
            .find(|&&s| !(SCORE_MIN..=SCORE_MAX).contains(&s))
        {
            return Err(CorpusError::ScoreOutOfRange {
                pair_id: pair_id.to_string(),
                score: bad,
            });
        }
        let mean_human = if human_scores.is_empty() {
            None
        } else {
            Some(human_scores.iter().sum::<i64>() as f64 / human_scores.len() as f64)
        };
        Ok(Self {
            pair_id: pair_id.to_string(),
            text_a: text_a.to_string(),
            text_b: text_b.to_string(),
            human_scores,
            mean_human,
        })
    }

    pub fn pair_id(&self) -> &str {
        &self.pair_id
    }

    pub fn text_a(&self) -> &str {
        &self.text_a
    }

    pub fn text_b(&self) -> &str {
        &self.text_b
    }

    pub fn human_scores(&self) -> &[i64] {
        &self.human_scores
    }

    /// Arithmetic mean of the annotator scores, if any were given.
    pub fn mean_human(&self) -> Option<f64> {
        self.mean_human
    }

    /// Median of the annotator scores (midpoint of the two central values
    /// for even counts), if any were given.
    pub fn median_human(&self) -> Option<f64> {
        if self.human_scores.is_empty() {
            return None;
        }
        let mut sorted = self.human_scores.clone();
        sorted.sort_unstable();
        let n = sorted.len();
        Some(if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        })
    }
}

/// An ordered collection of sentence pairs with a declared kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    dataset_id: String,
    kind: DatasetKind,
    pairs: Vec<SentencePair>,
    source_dataset_id: Option<String>,
}

impl PairDataset {
    pub fn new(
        dataset_id: &str,
        kind: DatasetKind,
        pairs: Vec<SentencePair>,
        source_dataset_id: Option<String>,
    ) -> Result<Self, CorpusError> {
        if kind.is_random() && source_dataset_id.is_none() {
            return Err(CorpusError::MissingSource(dataset_id.to_string()));
        }
        let mut seen = HashSet::new();
        for p in &pairs {
            if !seen.insert(p.pair_id.as_str()) {
                return Err(CorpusError::DuplicatePairId(p.pair_id.clone()));
            }
        }
        Ok(Self {
            dataset_id: dataset_id.to_string(),
            kind,
            pairs,
            source_dataset_id,
        })
    }

    pub fn dataset_id(&self) -> &str {
        &self.dataset_id
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn source_dataset_id(&self) -> Option<&str> {
        self.source_dataset_id.as_deref()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A set of datasets analysed together.
#[derive(Debug, Clone)]
pub struct Study {
    datasets: Vec<PairDataset>,
    metadata: BTreeMap<String, String>,
}

impl Study {
    pub fn new(
        datasets: Vec<PairDataset>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for d in &datasets {
            if !seen.insert(d.dataset_id.as_str()) {
                return Err(CorpusError::DuplicateDatasetId(d.dataset_id.clone()));
            }
        }
        Ok(Self { datasets, metadata })
    }

    pub fn datasets(&self) -> &[PairDataset] {
        &self.datasets
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn dataset(&self, id: &str) -> Option<&PairDataset> {
        self.datasets.iter().find(|d| d.dataset_id == id)
    }

    /// Analysis needs at least one non-random dataset.
    pub fn validate_for_analysis(&self) -> Result<(), CorpusError> {
        if self.datasets.iter().any(|d| !d.kind.is_random()) {
            Ok(())
        } else {
            Err(CorpusError::NoNonRandomDataset)
        }
    }
}

/// How to parse a pair file.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PairFormat {
    /// JSON Lines: `{"id": str, "a": str, "b": str, "scores": [int...]}`,
    /// `scores` optional.
    #[default]
    JsonLines,
    /// Tab-separated values with configurable column indices; scores are a
    /// single semicolon-separated column.
    Tsv {
        id_col: usize,
        a_col: usize,
        b_col: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scores_col: Option<usize>,
    },
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    id: String,
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    scores: Vec<i64>,
}

/// A row that was skipped, with the reason.
#[derive(Debug, Clone, Serialize)]
pub struct RowRejection {
    pub line: usize,
    pub reason: String,
}

/// Result of loading a pair file: the accepted pairs plus diagnostics for
/// rejected rows and non-fatal warnings.
#[derive(Debug)]
pub struct LoadOutcome {
    pub pairs: Vec<SentencePair>,
    pub rejected: Vec<RowRejection>,
    pub warnings: Vec<String>,
}

/// Load sentence pairs from a file.
///
/// Structurally malformed rows (bad JSON, missing columns, unparsable
/// scores) abort with an error naming the line. Rows that parse but violate
/// a value invariant (score out of range, empty text) are rejected
/// individually and reported in [`LoadOutcome::rejected`].
pub fn load_pairs(path: &Path, format: &PairFormat) -> Result<LoadOutcome, CorpusError> {
    let raw = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut pairs = Vec::new();
    let mut rejected = Vec::new();
    let mut warnings = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_row(line, line_no, format)?;
        match SentencePair::new(&record.id, &record.a, &record.b, record.scores) {
            Ok(pair) => pairs.push(pair),
            Err(e @ (CorpusError::ScoreOutOfRange { .. } | CorpusError::EmptyText { .. })) => {
                rejected.push(RowRejection {
                    line: line_no,
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    if pairs.is_empty() && rejected.is_empty() {
        warnings.push(format!("{}: no pairs found", path.display()));
    }
    Ok(LoadOutcome {
        pairs,
        rejected,
        warnings,
    })
}

fn parse_row(line: &str, line_no: usize, format: &PairFormat) -> Result<PairRecord, CorpusError> {
    match format {
        PairFormat::JsonLines => {
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedRow {
                line: line_no,
                msg: e.to_string(),
            })
        }
        PairFormat::Tsv {
            id_col,
            a_col,
            b_col,
            scores_col,
        } => {
            let cols: Vec<&str> = line.split('\t').collect();
            let field = |col: usize| -> Result<&str, CorpusError> {
                cols.get(col)
                    .copied()
                    .ok_or(CorpusError::MissingColumn { col, line: line_no })
            };
            let scores = match scores_col {
                None => Vec::new(),
                Some(col) => {
                    let cell = field(*col)?.trim();
                    if cell.is_empty() {
                        Vec::new()
                    } else {
                        cell.split(';')
                            .map(|s| {
                                s.trim()
                                    .parse::<i64>()
                                    .map_err(|e| CorpusError::MalformedRow {
                                        line: line_no,
                                        msg: format!("bad score {s:?}: {e}"),
                                    })
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    }
                }
            };
            Ok(PairRecord {
                id: field(*id_col)?.to_string(),
                a: field(*a_col)?.to_string(),
                b: field(*b_col)?.to_string(),
                scores,
            })
        }
    }
}

/// Write pairs as JSON Lines; inverse of [`load_pairs`] for that format.
pub fn save_pairs(pairs: &[SentencePair], path: &Path) -> Result<(), CorpusError> {
    let mut out = Vec::new();
    for p in pairs {
        let record = PairRecord {
            id: p.pair_id.clone(),
            a: p.text_a.clone(),
            b: p.text_b.clone(),
            scores: p.human_scores.clone(),
        };
        serde_json::to_writer(&mut out, &record).expect("in-memory serialization");
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(&out).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Which per-pair statistic aggregation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerPairStat {
    Mean,
    Median,
}

/// Aggregate of the human annotations over a dataset.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HumanAggregate {
    pub mean: f64,
    /// Sample standard deviation (ddof = 1) over per-pair values; 0 when a
    /// single pair made it degenerate.
    pub std: f64,
    pub n: usize,
    pub degenerate: bool,
}

/// Mean and sample standard deviation of per-pair human values.
///
/// Every pair must carry at least one score; otherwise the offending pair
/// ids are reported.
pub fn aggregate_human(dataset: &PairDataset) -> Result<HumanAggregate, CorpusError> {
    aggregate_human_with(dataset, PerPairStat::Mean)
}

/// Like [`aggregate_human`] but selecting the per-pair statistic.
pub fn aggregate_human_with(
    dataset: &PairDataset,
    stat: PerPairStat,
) -> Result<HumanAggregate, CorpusError> {
    let missing: Vec<String> = dataset
        .pairs
        .iter()
        .filter(|p| p.human_scores.is_empty())
        .map(|p| p.pair_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::MissingScores(missing));
    }
    let values: Vec<f64> = dataset
        .pairs
        .iter()
        .map(|p| match stat {
            PerPairStat::Mean => p.mean_human.expect("scores checked non-empty"),
            PerPairStat::Median => p.median_human().expect("scores checked non-empty"),
        })
        .collect();
    if values.is_empty() {
        return Err(CorpusError::MissingScores(vec![]));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let (std, degenerate) = if n == 1 {
        (0.0, true)
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var.sqrt(), false)
    };
    Ok(HumanAggregate {
        mean,
        std,
        n,
        degenerate,
    })
}

/// Uniform subsample without replacement; deterministic for a fixed seed.
///
/// The selection is a partial Fisher-Yates pass over the pair indices driven
/// by SplitMix64, as documented in [`crate::rng`]. The sampled dataset keeps
/// the kind and source of the original and appends `-sample` to its id.
pub fn sample_pairs(
    dataset: &PairDataset,
    n: usize,
    seed: u64,
) -> Result<PairDataset, CorpusError> {
    if n > dataset.len() {
        return Err(CorpusError::SampleTooLarge {
            requested: n,
            available: dataset.len(),
        });
    }
    let mut rng = SplitMix64::new(seed);
    let chosen = select_indices(dataset.len(), n, &mut rng);
    let pairs = chosen.iter().map(|&i| dataset.pairs[i].clone()).collect();
    PairDataset::new(
        &format!("{}-sample", dataset.dataset_id),
        dataset.kind,
        pairs,
        dataset.source_dataset_id.clone(),
    )
}

/// Build a random-pair benchmark dataset by crossing sentences of different
/// pairs.
///
/// The candidate list enumerates `(i, j)` with `i != j` in lexicographic
/// order, pairing `text_a` of pair `i` with `text_b` of pair `j`. A candidate
/// is admissible when the two surface strings differ and the combination does
/// not reproduce any originally aligned pair. `n` candidates are then drawn
/// without replacement by a partial Fisher-Yates pass under SplitMix64.
///
/// Output pairs carry no human scores, ids of the form `idA+idB`, kind
/// `random`, and the source dataset id.
pub fn generate_random_pairs(
    dataset: &PairDataset,
    n: usize,
    seed: u64,
) -> Result<PairDataset, CorpusError> {
    if dataset.len() < 2 {
        return Err(CorpusError::TooFewPairs(dataset.dataset_id.clone()));
    }
    let aligned: HashSet<(&str, &str)> = dataset
        .pairs
        .iter()
        .map(|p| (p.text_a.as_str(), p.text_b.as_str()))
        .collect();
    let mut candidates = Vec::new();
    for (i, pi) in dataset.pairs.iter().enumerate() {
        for (j, pj) in dataset.pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            let a = pi.text_a.as_str();
            let b = pj.text_b.as_str();
            if a == b || aligned.contains(&(a, b)) {
                continue;
            }
            candidates.push((i, j));
        }
    }
    if n > candidates.len() {
        return Err(CorpusError::InsufficientCandidates {
            requested: n,
            achievable: candidates.len(),
        });
    }
    let mut rng = SplitMix64::new(seed);
    let chosen = select_indices(candidates.len(), n, &mut rng);
    let pairs: Vec<SentencePair> = chosen
        .iter()
        .map(|&c| {
            let (i, j) = candidates[c];
            SentencePair::new(
                &format!("{}+{}", dataset.pairs[i].pair_id, dataset.pairs[j].pair_id),
                &dataset.pairs[i].text_a,
                &dataset.pairs[j].text_b,
                Vec::new(),
            )
            .expect("source texts already validated")
        })
        .collect();
    PairDataset::new(
        &format!("{}-random", dataset.dataset_id),
        DatasetKind::Random,
        pairs,
        Some(dataset.dataset_id.clone()),
    )
}

/// One dataset entry of a study manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub dataset_id: String,
    pub kind: DatasetKind,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_dataset_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<PairFormat>,
}

/// A study manifest: the list of datasets plus free-form metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyManifest {
    pub datasets: Vec<ManifestEntry>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Load a study from a manifest file. Dataset paths are resolved relative to
/// the manifest's directory. Row rejections across all datasets are returned
/// as warnings.
pub fn load_study(manifest_path: &Path) -> Result<(Study, Vec<String>), CorpusError> {
    let raw = fs::read_to_string(manifest_path).map_err(|source| CorpusError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    let manifest: StudyManifest =
        serde_json::from_str(&raw).map_err(|e| CorpusError::Manifest(e.to_string()))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut datasets = Vec::new();
    let mut warnings = Vec::new();
    for entry in &manifest.datasets {
        let path = if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            base.join(&entry.path)
        };
        let format = entry.format.clone().unwrap_or_default();
        let outcome = load_pairs(&path, &format)?;
        for r in &outcome.rejected {
            warnings.push(format!(
                "{}: line {}: {}",
                entry.dataset_id, r.line, r.reason
            ));
        }
        warnings.extend(outcome.warnings);
        datasets.push(PairDataset::new(
            &entry.dataset_id,
            entry.kind,
            outcome.pairs,
            entry.source_dataset_id.clone(),
        )?);
    }
    let study = Study::new(datasets, manifest.metadata)?;
    Ok((study, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn write(path: &Path, contents: &str) {
        fs::write(path, contents).unwrap();
    }

    fn pair(id: &str, a: &str, b: &str, scores: &[i64]) -> SentencePair {
        SentencePair::new(id, a, b, scores.to_vec()).unwrap()
    }

    fn dataset(id: &str, pairs: Vec<SentencePair>) -> PairDataset {
        PairDataset::new(id, DatasetKind::Paraphrase, pairs, None).unwrap()
    }

    #[test]
    fn jsonl_row_computes_mean() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        write(
            &path,
            r#"{"id":"p1","a":"the cat sat","b":"a cat was sitting","scores":[4,5,4]}
"#,
        );
        let outcome = load_pairs(&path, &PairFormat::JsonLines).unwrap();
        assert_eq!(outcome.pairs.len(), 1);
        let mean = outcome.pairs[0].mean_human().unwrap();
        assert!((mean - 13.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn empty_file_gives_empty_dataset_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        write(&path, "");
        let outcome = load_pairs(&path, &PairFormat::JsonLines).unwrap();
        assert!(outcome.pairs.is_empty());
        assert_eq!(outcome.warnings.len(), 1);
    }

    #[test]
    fn out_of_range_score_rejects_row_naming_bound() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        write(
            &path,
            concat!(
                r#"{"id":"p1","a":"good text","b":"also good","scores":[7]}"#,
                "\n",
                r#"{"id":"p2","a":"kept","b":"kept too","scores":[3]}"#,
                "\n"
            ),
        );
        let outcome = load_pairs(&path, &PairFormat::JsonLines).unwrap();
        assert_eq!(outcome.pairs.len(), 1);
        assert_eq!(outcome.rejected.len(), 1);
        assert_eq!(outcome.rejected[0].line, 1);
        assert!(outcome.rejected[0].reason.contains("[1,5]"));
    }

    #[test]
    fn malformed_json_errors_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        write(&path, "{\"id\":\"p1\"\nnot json\n");
        match load_pairs(&path, &PairFormat::JsonLines) {
            Err(CorpusError::MalformedRow { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn tsv_mapping_reads_columns_and_scores() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        write(&path, "x\tp1\tleft text\tright text\t4;5\n");
        let fmt = PairFormat::Tsv {
            id_col: 1,
            a_col: 2,
            b_col: 3,
            scores_col: Some(4),
        };
        let outcome = load_pairs(&path, &fmt).unwrap();
        assert_eq!(outcome.pairs.len(), 1);
        assert_eq!(outcome.pairs[0].human_scores(), &[4, 5]);
        assert_eq!(outcome.pairs[0].text_a(), "left text");
    }

    #[test]
    fn tsv_missing_column_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        write(&path, "p1\tonly two\n");
        let fmt = PairFormat::Tsv {
            id_col: 0,
            a_col: 1,
            b_col: 2,
            scores_col: None,
        };
        assert!(matches!(
            load_pairs(&path, &fmt),
            Err(CorpusError::MissingColumn { col: 2, line: 1 })
        ));
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.jsonl");
        let pairs = vec![
            pair("p1", "a b c", "d e f", &[1, 5]),
            pair("p2", "quoted \" text", "tab\tand more", &[]),
        ];
        save_pairs(&pairs, &path).unwrap();
        let outcome = load_pairs(&path, &PairFormat::JsonLines).unwrap();
        assert_eq!(outcome.pairs, pairs);
    }

    #[test]
    fn aggregate_simple_values() {
        let ds = dataset(
            "d",
            vec![
                pair("p1", "x", "y", &[3]),
                pair("p2", "x", "y", &[4]),
                pair("p3", "x", "y", &[5]),
            ],
        );
        let agg = aggregate_human(&ds).unwrap();
        assert_eq!(agg.mean, 4.0);
        assert_eq!(agg.std, 1.0);
        assert_eq!(agg.n, 3);
        assert!(!agg.degenerate);
    }

    #[test]
    fn aggregate_single_pair_is_degenerate() {
        let ds = dataset("d", vec![pair("p1", "x", "y", &[4])]);
        let agg = aggregate_human(&ds).unwrap();
        assert_eq!(agg.mean, 4.0);
        assert_eq!(agg.std, 0.0);
        assert!(agg.degenerate);
    }

    #[test]
    fn aggregate_lists_pairs_without_scores() {
        let ds = dataset(
            "d",
            vec![pair("p1", "x", "y", &[4]), pair("p2", "x", "y", &[])],
        );
        match aggregate_human(&ds) {
            Err(CorpusError::MissingScores(ids)) => assert_eq!(ids, vec!["p2"]),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut pairs = vec![
            pair("p1", "x", "y", &[2, 3]),
            pair("p2", "x", "y", &[5]),
            pair("p3", "x", "y", &[1, 4, 4]),
        ];
        let forward = aggregate_human(&dataset("d", pairs.clone())).unwrap();
        pairs.reverse();
        let backward = aggregate_human(&dataset("d", pairs)).unwrap();
        assert!((forward.mean - backward.mean).abs() < 1e-12);
        assert!((forward.std - backward.std).abs() < 1e-12);
    }

    #[test]
    fn median_stat_differs_from_mean() {
        let ds = dataset("d", vec![pair("p1", "x", "y", &[1, 1, 5])]);
        let mean = aggregate_human_with(&ds, PerPairStat::Mean).unwrap();
        let median = aggregate_human_with(&ds, PerPairStat::Median).unwrap();
        assert!((mean.mean - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(median.mean, 1.0);
    }

    #[test]
    fn sample_full_size_keeps_membership() {
        let ds = dataset(
            "d",
            (0..5)
                .map(|i| pair(&format!("p{i}"), "x", "y", &[]))
                .collect(),
        );
        let sampled = sample_pairs(&ds, 5, 3).unwrap();
        let mut ids: Vec<&str> = sampled.pairs().iter().map(|p| p.pair_id()).collect();
        ids.sort_unstable();
        assert_eq!(ids, ["p0", "p1", "p2", "p3", "p4"]);
    }

    #[test]
    fn sample_is_deterministic() {
        let ds = dataset(
            "d",
            (0..10)
                .map(|i| pair(&format!("p{i}"), "x", "y", &[]))
                .collect(),
        );
        let a = sample_pairs(&ds, 4, 42).unwrap();
        let b = sample_pairs(&ds, 4, 42).unwrap();
        assert_eq!(a.pairs(), b.pairs());
    }

    #[test]
    fn sample_matches_replayed_rng_trace() {
        let ds = dataset(
            "d",
            (0..4)
                .map(|i| pair(&format!("p{i}"), "x", "y", &[]))
                .collect(),
        );
        let sampled = sample_pairs(&ds, 2, 17).unwrap();
        // Replay the documented recipe by hand.
        let mut rng = SplitMix64::new(17);
        let mut idx = [0usize, 1, 2, 3];
        let r0 = (rng.next_u64() % 4) as usize;
        idx.swap(0, r0);
        let r1 = (rng.next_u64() % 3) as usize;
        idx.swap(1, 1 + r1);
        let expect: Vec<String> = idx[..2].iter().map(|i| format!("p{i}")).collect();
        let got: Vec<&str> = sampled.pairs().iter().map(|p| p.pair_id()).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn sample_too_large_errors() {
        let ds = dataset("d", vec![pair("p1", "x", "y", &[])]);
        assert!(matches!(
            sample_pairs(&ds, 2, 0),
            Err(CorpusError::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn random_pairs_never_reproduce_alignment() {
        let ds = dataset(
            "d",
            vec![pair("p1", "a1", "b1", &[]), pair("p2", "a2", "b2", &[])],
        );
        let random = generate_random_pairs(&ds, 1, 9).unwrap();
        assert_eq!(random.kind(), DatasetKind::Random);
        assert_eq!(random.source_dataset_id(), Some("d"));
        let p = &random.pairs()[0];
        assert!(!(p.text_a() == "a1" && p.text_b() == "b1"));
        assert!(!(p.text_a() == "a2" && p.text_b() == "b2"));
    }

    #[test]
    fn random_pairs_zero_n_is_empty() {
        let ds = dataset(
            "d",
            vec![pair("p1", "a1", "b1", &[]), pair("p2", "a2", "b2", &[])],
        );
        let random = generate_random_pairs(&ds, 0, 1).unwrap();
        assert!(random.is_empty());
    }

    #[test]
    fn random_pairs_match_enumerated_candidates_under_rng() {
        let ds = dataset(
            "d",
            vec![
                pair("p1", "a1", "b1", &[]),
                pair("p2", "a2", "b2", &[]),
                pair("p3", "a3", "b3", &[]),
            ],
        );
        let random = generate_random_pairs(&ds, 3, 5).unwrap();
        // Brute-force admissible set in lexicographic order: all (i, j),
        // i != j, since every surface string here is distinct.
        let candidates = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
        let mut rng = SplitMix64::new(5);
        let mut idx: Vec<usize> = (0..6).collect();
        for k in 0..3 {
            let r = (rng.next_u64() % (6 - k) as u64) as usize;
            idx.swap(k, k + r);
        }
        let expect: Vec<(String, String)> = idx[..3]
            .iter()
            .map(|&c| {
                let (i, j) = candidates[c];
                (format!("a{}", i + 1), format!("b{}", j + 1))
            })
            .collect();
        let got: Vec<(String, String)> = random
            .pairs()
            .iter()
            .map(|p| (p.text_a().to_string(), p.text_b().to_string()))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn random_pairs_reports_achievable_maximum() {
        let ds = dataset(
            "d",
            vec![pair("p1", "a1", "b1", &[]), pair("p2", "a2", "b2", &[])],
        );
        match generate_random_pairs(&ds, 5, 0) {
            Err(CorpusError::InsufficientCandidates {
                requested,
                achievable,
            }) => {
                assert_eq!(requested, 5);
                assert_eq!(achievable, 2);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn random_dataset_requires_source() {
        let err = PairDataset::new("r", DatasetKind::Random, vec![], None);
        assert!(matches!(err, Err(CorpusError::MissingSource(_))));
    }

    #[test]
    fn duplicate_pair_ids_rejected() {
        let err = PairDataset::new(
            "d",
            DatasetKind::Paraphrase,
            vec![pair("p1", "x", "y", &[]), pair("p1", "z", "w", &[])],
            None,
        );
        assert!(matches!(err, Err(CorpusError::DuplicatePairId(_))));
    }

    #[test]
    fn study_requires_non_random_for_analysis() {
        let random_only = Study::new(
            vec![PairDataset::new(
                "r",
                DatasetKind::Random,
                vec![pair("p1", "x", "y", &[])],
                Some("src".into()),
            )
            .unwrap()],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(random_only.validate_for_analysis().is_err());
    }

    #[test]
    fn manifest_loads_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        write(
            &dir.path().join("d1.jsonl"),
            "{\"id\":\"p1\",\"a\":\"x x\",\"b\":\"y y\",\"scores\":[3]}\n",
        );
        write(
            &dir.path().join("manifest.json"),
            r#"{"datasets":[{"dataset_id":"d1","kind":"paraphrase","path":"d1.jsonl"}],"metadata":{"note":"demo"}}"#,
        );
        let (study, warnings) = load_study(&dir.path().join("manifest.json")).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(study.datasets().len(), 1);
        assert_eq!(study.dataset("d1").unwrap().len(), 1);
        assert_eq!(study.metadata()["note"], "demo");
    }
}
