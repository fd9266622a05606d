//! Word-vector tables, sentence vectors, and ingestion of precomputed
//! contextual vectors.
//!
//! Static tables use the plain text layout `token v1 v2 ... vd`, one word per
//! line. Contextual vectors (per-token vectors plus optional sentence-level
//! vectors) are computed out of process and ingested from JSON Lines; this
//! crate never runs an encoder.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::TokenSequence;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no vectors found in {0}")]
    NoVectors(String),
    #[error("line {line}: expected {expected} components, found {found}")]
    InconsistentRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse vector component: {msg}")]
    BadComponent { line: usize, msg: String },
    #[error("line {line}: bad contextual record: {msg}")]
    BadContextualRow { line: usize, msg: String },
    #[error("pair {pair_id}: token/vector count mismatch on side {side}")]
    TokenVectorMismatch { pair_id: String, side: char },
    #[error("pair {pair_id}: inconsistent vector dimensions")]
    InconsistentDims { pair_id: String },
    #[error("duplicate pair id {0} in contextual file")]
    DuplicatePair(String),
    #[error("vector dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("cosine of a zero-norm vector is undefined")]
    ZeroNorm,
    #[error("no in-vocabulary tokens in sentence")]
    AllOov,
}

/// Immutable token-to-vector map with a fixed dimensionality.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    name: String,
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

/// Table plus any non-fatal diagnostics produced while loading it.
#[derive(Debug)]
pub struct TableLoad {
    pub table: EmbeddingTable,
    pub warnings: Vec<String>,
}

impl EmbeddingTable {
    pub fn new(name: &str, dim: usize) -> Self {
        Self {
            name: name.to_string(),
            dim,
            vectors: BTreeMap::new(),
        }
    }

    /// Insert a vector; replaces an existing entry for the same token.
    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<(), EmbeddingError> {
        if vector.len() != self.dim {
            return Err(EmbeddingError::DimMismatch(self.dim, vector.len()));
        }
        self.vectors.insert(token.to_string(), vector);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector for a token, trying the exact form first and then the
    /// lowercased form. `None` marks an out-of-vocabulary token.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        if let Some(v) = self.vectors.get(token) {
            return Some(v.as_slice());
        }
        let lowered = token.to_lowercase();
        if lowered != token {
            return self.vectors.get(&lowered).map(Vec::as_slice);
        }
        None
    }
}

/// Load a table from the text format, one `token v1 ... vd` row per line.
///
/// The first row fixes the dimensionality; any row with a different width is
/// an error naming its line. A repeated token overwrites the earlier vector
/// and adds a warning.
pub fn load_table(path: &Path, name: &str) -> Result<TableLoad, EmbeddingError> {
    let raw = fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut table: Option<EmbeddingTable> = None;
    let mut warnings = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let mut parts = line.split_whitespace();
        let token = parts.next().expect("non-empty line has a first field");
        let comps: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
        let comps = comps.map_err(|e| EmbeddingError::BadComponent {
            line: line_no,
            msg: e.to_string(),
        })?;
        let table = table.get_or_insert_with(|| EmbeddingTable::new(name, comps.len()));
        if comps.len() != table.dim {
            return Err(EmbeddingError::InconsistentRow {
                line: line_no,
                expected: table.dim,
                found: comps.len(),
            });
        }
        if table.vectors.insert(token.to_string(), comps).is_some() {
            warnings.push(format!(
                "line {line_no}: duplicate token {token:?}, keeping the later vector"
            ));
        }
    }
    match table {
        Some(table) if !table.is_empty() => Ok(TableLoad { table, warnings }),
        _ => Err(EmbeddingError::NoVectors(path.display().to_string())),
    }
}

/// How a sentence vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceVectorSource {
    MinMaxMean,
    External,
}

/// A dense sentence-level vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVector {
    pub values: Vec<f64>,
    pub provenance: SentenceVectorSource,
}

/// Sentence vector built by concatenating the elementwise minimum, maximum
/// and mean of the in-vocabulary token vectors, in that order.
///
/// Out-of-vocabulary tokens are skipped; a sentence with no in-vocabulary
/// token is an error so callers can record the pair as missing.
pub fn sentence_embed_minmaxmean(
    tokens: &TokenSequence,
    table: &EmbeddingTable,
) -> Result<SentenceVector, EmbeddingError> {
    let vectors: Vec<&[f64]> = tokens
        .tokens()
        .iter()
        .filter_map(|t| table.lookup(t))
        .collect();
    if vectors.is_empty() {
        return Err(EmbeddingError::AllOov);
    }
    let dim = table.dim();
    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    let mut mean = vec![0.0; dim];
    for v in &vectors {
        for d in 0..dim {
            min[d] = min[d].min(v[d]);
            max[d] = max[d].max(v[d]);
            mean[d] += v[d];
        }
    }
    let count = vectors.len() as f64;
    for m in &mut mean {
        *m /= count;
    }
    let mut values = min;
    values.extend_from_slice(&max);
    values.extend_from_slice(&mean);
    Ok(SentenceVector {
        values,
        provenance: SentenceVectorSource::MinMaxMean,
    })
}

/// Precomputed contextual vectors for one sentence pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextualPairVectors {
    #[serde(rename = "id")]
    pub pair_id: String,
    pub tokens_a: Vec<String>,
    pub vecs_a: Vec<Vec<f64>>,
    pub tokens_b: Vec<String>,
    pub vecs_b: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sent_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sent_b: Option<Vec<f64>>,
}

impl ContextualPairVectors {
    fn validate(&self) -> Result<(), EmbeddingError> {
        if self.tokens_a.len() != self.vecs_a.len() {
            return Err(EmbeddingError::TokenVectorMismatch {
                pair_id: self.pair_id.clone(),
                side: 'a',
            });
        }
        if self.tokens_b.len() != self.vecs_b.len() {
            return Err(EmbeddingError::TokenVectorMismatch {
                pair_id: self.pair_id.clone(),
                side: 'b',
            });
        }
        let mut dims = self.vecs_a.iter().chain(self.vecs_b.iter()).map(Vec::len);
        if let Some(first) = dims.next() {
            if dims.any(|d| d != first) {
                return Err(EmbeddingError::InconsistentDims {
                    pair_id: self.pair_id.clone(),
                });
            }
        }
        if let (Some(a), Some(b)) = (&self.sent_a, &self.sent_b) {
            if a.len() != b.len() {
                return Err(EmbeddingError::InconsistentDims {
                    pair_id: self.pair_id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Load a contextual-vector file: JSON Lines, one pair per line.
pub fn load_contextual(
    path: &Path,
) -> Result<BTreeMap<String, ContextualPairVectors>, EmbeddingError> {
    let raw = fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = BTreeMap::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ContextualPairVectors =
            serde_json::from_str(line).map_err(|e| EmbeddingError::BadContextualRow {
                line: idx + 1,
                msg: e.to_string(),
            })?;
        record.validate()?;
        let id = record.pair_id.clone();
        if out.insert(id.clone(), record).is_some() {
            return Err(EmbeddingError::DuplicatePair(id));
        }
    }
    Ok(out)
}

/// Cosine similarity `u.v / (|u| |v|)` in `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimMismatch(u.len(), v.len()));
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    // sqrt(nu * nv) keeps cosine(u, u) exactly 1.
    Ok(dot / (nu * nv).sqrt())
}

/// Euclidean distance `|u - v|`.
pub fn euclidean(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimMismatch(u.len(), v.len()));
    }
    let sum: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;

    fn toy_table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new("toy", 2);
        t.insert("aa", vec![1.0, 2.0]).unwrap();
        t.insert("bb", vec![3.0, 0.0]).unwrap();
        t
    }

    #[test]
    fn load_table_reads_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        std::fs::write(&path, "a 1 0\nb 0 1\n").unwrap();
        let load = load_table(&path, "demo").unwrap();
        assert_eq!(load.table.dim(), 2);
        assert_eq!(load.table.len(), 2);
        assert!(load.warnings.is_empty());
        assert_eq!(load.table.lookup("a").unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn load_table_rejects_short_row_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        std::fs::write(&path, "a 1 0\nb 0 1\nc 1\n").unwrap();
        match load_table(&path, "demo") {
            Err(EmbeddingError::InconsistentRow {
                line,
                expected,
                found,
            }) => {
                assert_eq!((line, expected, found), (3, 2, 1));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn load_table_rejects_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        std::fs::write(&path, "").unwrap();
        assert!(matches!(
            load_table(&path, "demo"),
            Err(EmbeddingError::NoVectors(_))
        ));
    }

    #[test]
    fn load_table_warns_on_duplicate_and_keeps_last() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        std::fs::write(&path, "a 1 0\na 0 1\n").unwrap();
        let load = load_table(&path, "demo").unwrap();
        assert_eq!(load.warnings.len(), 1);
        assert_eq!(load.table.lookup("a").unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn lookup_case_folds() {
        let t = toy_table();
        assert!(t.lookup("AA").is_some());
        assert!(t.lookup("aa").is_some());
        assert!(t.lookup("zz").is_none());
    }

    #[test]
    fn minmaxmean_concatenation() {
        let t = toy_table();
        let tokens = tokenize("aa bb").unwrap();
        let v = sentence_embed_minmaxmean(&tokens, &t).unwrap();
        assert_eq!(v.values, vec![1.0, 0.0, 3.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn minmaxmean_single_word_repeats_vector() {
        let t = toy_table();
        let tokens = tokenize("aa").unwrap();
        let v = sentence_embed_minmaxmean(&tokens, &t).unwrap();
        assert_eq!(v.values, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn minmaxmean_all_oov_is_error() {
        let t = toy_table();
        let tokens = tokenize("zz yy").unwrap();
        assert!(matches!(
            sentence_embed_minmaxmean(&tokens, &t),
            Err(EmbeddingError::AllOov)
        ));
    }

    #[test]
    fn cosine_identity_orthogonal_opposite() {
        let u = vec![0.3, -0.7, 0.2];
        assert_eq!(cosine(&u, &u).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        assert!((cosine(&u, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero_norm_is_error() {
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(EmbeddingError::ZeroNorm)
        ));
    }

    #[test]
    fn euclidean_cases() {
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(
            euclidean(&[1.0, 2.0], &[4.0, 6.0]).unwrap(),
            euclidean(&[4.0, 6.0], &[1.0, 2.0]).unwrap()
        );
        assert!(euclidean(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn contextual_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ctx.jsonl");
        std::fs::write(
            &path,
            concat!(
                r#"{"id":"p1","tokens_a":["a"],"vecs_a":[[1.0,0.0]],"tokens_b":["b"],"vecs_b":[[0.0,1.0]],"sent_a":[1.0,0.0],"sent_b":[0.0,1.0]}"#,
                "\n"
            ),
        )
        .unwrap();
        let map = load_contextual(&path).unwrap();
        assert_eq!(map.len(), 1);
        assert_eq!(map["p1"].tokens_a, ["a"]);

        std::fs::write(
            &path,
            r#"{"id":"p1","tokens_a":["a","b"],"vecs_a":[[1.0]],"tokens_b":["b"],"vecs_b":[[1.0]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_contextual(&path),
            Err(EmbeddingError::TokenVectorMismatch { side: 'a', .. })
        ));

        std::fs::write(
            &path,
            concat!(
                r#"{"id":"p1","tokens_a":["a"],"vecs_a":[[1.0]],"tokens_b":["b"],"vecs_b":[[1.0]]}"#,
                "\n",
                r#"{"id":"p1","tokens_a":["a"],"vecs_a":[[1.0]],"tokens_b":["b"],"vecs_b":[[1.0]]}"#,
                "\n"
            ),
        )
        .unwrap();
        assert!(matches!(
            load_contextual(&path),
            Err(EmbeddingError::DuplicatePair(_))
        ));
    }
}
