//! Comparison machinery over the score grid: per-dataset summaries,
//! metric-induced dataset orders, the random-pair floor check, correlations
//! with human judgment, the variability ratio, and order-agreement scores.
//!
//! The floor check is the validity criterion: a usable metric must rate
//! every random-pair dataset as less similar than every paraphrase or
//! rewrite dataset. Orders are compared by Spearman rank correlation,
//! position coincidence, and the minimum number of adjacent swaps.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{aggregate_human, Study};
use crate::metrics::{MetricDescriptor, PairScore, Polarity, ScoreGrid};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("all values are missing")]
    AllMissing,
    #[error("orders cover different dataset sets")]
    MismatchedSets,
    #[error("need at least {needed} datasets, have {got}")]
    TooFewDatasets { needed: usize, got: usize },
    #[error("no random dataset in study")]
    NoRandomDatasets,
    #[error("no non-random dataset in study")]
    NoNonRandomDatasets,
    #[error("need at least 2 random datasets for variability, have {0}")]
    TooFewRandomDatasets(usize),
    #[error("zero variance on one side of the correlation")]
    ZeroVariance,
    #[error("value range is zero; ratio undefined")]
    DegenerateRange,
    #[error("dataset {0} missing from summaries")]
    MissingDataset(String),
}

/// Mean and spread of one metric over one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub metric: String,
    pub dataset_id: String,
    pub mean: f64,
    pub std: f64,
    pub n_scored: usize,
    pub n_missing: usize,
    pub degenerate: bool,
}

/// Mean and sample standard deviation (ddof = 1) over the non-missing
/// values; missing values are counted, not imputed.
pub fn summarize(
    metric: &str,
    dataset_id: &str,
    scores: &[PairScore],
) -> Result<DatasetSummary, AnalysisError> {
    let values: Vec<f64> = scores.iter().filter_map(|s| s.value).collect();
    if values.is_empty() {
        return Err(AnalysisError::AllMissing);
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let (std, degenerate) = if n == 1 {
        (0.0, true)
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var.sqrt(), false)
    };
    Ok(DatasetSummary {
        metric: metric.to_string(),
        dataset_id: dataset_id.to_string(),
        mean,
        std,
        n_scored: n,
        n_missing: scores.len() - n,
        degenerate,
    })
}

/// Datasets ranked from most to least similar under one metric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedOrder {
    pub metric: String,
    /// Position 0 is rank 1: the most similar dataset after polarity
    /// normalization.
    pub ranking: Vec<String>,
    /// Whether any two datasets tied on the normalized mean; ties are broken
    /// by dataset id.
    pub has_ties: bool,
}

impl InducedOrder {
    /// Rank (1-based) of each dataset id.
    pub fn ranks(&self) -> BTreeMap<&str, usize> {
        self.ranking
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i + 1))
            .collect()
    }
}

/// Sort datasets by polarity-normalized mean, descending; ties break
/// lexicographically on the dataset id and set the tie flag.
pub fn induce_order(
    metric: &str,
    polarity: Polarity,
    means: &BTreeMap<String, f64>,
) -> InducedOrder {
    let mut entries: Vec<(&String, f64)> = means
        .iter()
        .map(|(d, &m)| (d, polarity.normalize(m)))
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let has_ties = entries.windows(2).any(|w| w[0].1 == w[1].1);
    InducedOrder {
        metric: metric.to_string(),
        ranking: entries.into_iter().map(|(d, _)| d.clone()).collect(),
        has_ties,
    }
}

/// A random-pair dataset scored as more similar than a non-random dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityViolation {
    pub random_dataset: String,
    pub offended_dataset: String,
}

/// The random-pair floor check: flag every (random, non-random) pair whose
/// normalized means are ordered the wrong way around. An empty list means
/// the metric passes.
pub fn check_inequalities(
    polarity: Polarity,
    means: &BTreeMap<String, f64>,
    study: &Study,
) -> Result<Vec<InequalityViolation>, AnalysisError> {
    let mut random = Vec::new();
    let mut non_random = Vec::new();
    for dataset in study.datasets() {
        let id = dataset.dataset_id();
        let mean = means
            .get(id)
            .ok_or_else(|| AnalysisError::MissingDataset(id.to_string()))?;
        let normalized = polarity.normalize(*mean);
        if dataset.kind().is_random() {
            random.push((id, normalized));
        } else {
            non_random.push((id, normalized));
        }
    }
    if random.is_empty() {
        return Err(AnalysisError::NoRandomDatasets);
    }
    if non_random.is_empty() {
        return Err(AnalysisError::NoNonRandomDatasets);
    }
    let mut violations = Vec::new();
    for &(r, r_norm) in &random {
        for &(o, o_norm) in &non_random {
            if r_norm > o_norm {
                violations.push(InequalityViolation {
                    random_dataset: r.to_string(),
                    offended_dataset: o.to_string(),
                });
            }
        }
    }
    Ok(violations)
}

/// Pearson correlation between two equally long value sequences.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(AnalysisError::TooFewDatasets {
            needed: 3,
            got: xs.len().min(ys.len()),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation between polarity-normalized per-dataset metric means
/// and per-dataset human means, matched by dataset id.
pub fn pearson_with_human(
    polarity: Polarity,
    metric_means: &BTreeMap<String, f64>,
    human_means: &BTreeMap<String, f64>,
) -> Result<f64, AnalysisError> {
    if metric_means.len() != human_means.len()
        || metric_means
            .keys()
            .zip(human_means.keys())
            .any(|(a, b)| a != b)
    {
        return Err(AnalysisError::MismatchedSets);
    }
    let xs: Vec<f64> = metric_means
        .values()
        .map(|&m| polarity.normalize(m))
        .collect();
    let ys: Vec<f64> = human_means.values().copied().collect();
    pearson(&xs, &ys)
}

fn paired_ranks(
    o1: &InducedOrder,
    o2: &InducedOrder,
) -> Result<Vec<(usize, usize)>, AnalysisError> {
    let r1 = o1.ranks();
    let r2 = o2.ranks();
    if r1.len() != r2.len() || r1.keys().any(|k| !r2.contains_key(k)) {
        return Err(AnalysisError::MismatchedSets);
    }
    Ok(r1.iter().map(|(d, &rank1)| (rank1, r2[d])).collect())
}

/// Spearman rank correlation between two induced orders over the same
/// datasets: `1 - 6 sum(d^2) / (n (n^2 - 1))`.
pub fn order_correlation(o1: &InducedOrder, o2: &InducedOrder) -> Result<f64, AnalysisError> {
    let pairs = paired_ranks(o1, o2)?;
    let n = pairs.len();
    if n < 2 {
        return Err(AnalysisError::TooFewDatasets { needed: 2, got: n });
    }
    let d2: f64 = pairs
        .iter()
        .map(|&(a, b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    let nf = n as f64;
    Ok(1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0)))
}

/// Kendall rank correlation of two induced orders (no ties by construction):
/// `1 - 4 swaps / (n (n - 1))`.
pub fn order_tau(o1: &InducedOrder, o2: &InducedOrder) -> Result<f64, AnalysisError> {
    let n = o1.ranking.len();
    if n < 2 {
        return Err(AnalysisError::TooFewDatasets { needed: 2, got: n });
    }
    let swaps = swap_count(o1, o2)? as f64;
    let nf = n as f64;
    Ok(1.0 - 4.0 * swaps / (nf * (nf - 1.0)))
}

/// Variability ratio: the metric's value range over random-pair datasets
/// divided by its range over all datasets, on raw per-dataset means.
pub fn variability(means: &BTreeMap<String, f64>, study: &Study) -> Result<f64, AnalysisError> {
    let mut random = Vec::new();
    let mut all = Vec::new();
    for dataset in study.datasets() {
        let id = dataset.dataset_id();
        let mean = *means
            .get(id)
            .ok_or_else(|| AnalysisError::MissingDataset(id.to_string()))?;
        if dataset.kind().is_random() {
            random.push(mean);
        }
        all.push(mean);
    }
    if random.len() < 2 {
        return Err(AnalysisError::TooFewRandomDatasets(random.len()));
    }
    if all.len() < 2 {
        return Err(AnalysisError::TooFewDatasets {
            needed: 2,
            got: all.len(),
        });
    }
    let range = |v: &[f64]| {
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    };
    let denominator = range(&all);
    if denominator == 0.0 {
        return Err(AnalysisError::DegenerateRange);
    }
    Ok(range(&random) / denominator)
}

/// Number of positions where both rankings place the same dataset.
pub fn rank_coincidence(o: &InducedOrder, other: &InducedOrder) -> Result<usize, AnalysisError> {
    if o.ranking.len() != other.ranking.len()
        || o.ranks().keys().any(|k| !other.ranks().contains_key(k))
    {
        return Err(AnalysisError::MismatchedSets);
    }
    Ok(o.ranking
        .iter()
        .zip(&other.ranking)
        .filter(|(a, b)| a == b)
        .count())
}

/// Minimum number of adjacent transpositions turning `o` into `target`:
/// the inversion count of `o` read in `target`'s ranks.
pub fn swap_count(o: &InducedOrder, target: &InducedOrder) -> Result<usize, AnalysisError> {
    let target_ranks = target.ranks();
    if o.ranking.len() != target_ranks.len() {
        return Err(AnalysisError::MismatchedSets);
    }
    let sequence: Vec<usize> = o
        .ranking
        .iter()
        .map(|d| {
            target_ranks
                .get(d.as_str())
                .copied()
                .ok_or(AnalysisError::MismatchedSets)
        })
        .collect::<Result<_, _>>()?;
    let mut inversions = 0;
    for i in 0..sequence.len() {
        for j in i + 1..sequence.len() {
            if sequence[i] > sequence[j] {
                inversions += 1;
            }
        }
    }
    Ok(inversions)
}

/// Everything the comparison produces for one metric.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub polarity: Polarity,
    pub dataset_means: BTreeMap<String, f64>,
    pub induced_order: Vec<String>,
    pub order_ties: bool,
    pub inequality_violations: Option<Vec<InequalityViolation>>,
    pub pearson_with_human: Option<f64>,
    pub pearson_pair_level: Option<f64>,
    pub order_corr_with_human: Option<f64>,
    pub order_tau_with_human: Option<f64>,
    pub variability: Option<f64>,
    pub rank_coincidence: Option<usize>,
    pub swap_count: Option<usize>,
}

/// The full comparison: one [`MetricReport`] per metric, the human-induced
/// order when human labels exist, and the matrix of pairwise order
/// correlations between metrics.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub metric_names: Vec<String>,
    pub metrics: Vec<MetricReport>,
    pub human_means: Option<BTreeMap<String, f64>>,
    pub human_order: Option<Vec<String>>,
    /// Spearman correlation of induced orders, indexed like `metric_names`.
    pub order_corr_matrix: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Assemble the comparison report from a completed score grid.
///
/// Sections whose preconditions are not met (no random datasets, missing
/// human labels, fewer than two random datasets for the variability ratio)
/// are omitted with a warning instead of failing the whole report.
pub fn build_report(
    study: &Study,
    grid: &ScoreGrid,
    registry: &[MetricDescriptor],
) -> Result<ComparisonReport, AnalysisError> {
    let mut warnings = Vec::new();

    let human_means: Option<BTreeMap<String, f64>> = {
        let mut means = BTreeMap::new();
        let mut ok = true;
        for dataset in study.datasets() {
            match aggregate_human(dataset) {
                Ok(agg) => {
                    means.insert(dataset.dataset_id().to_string(), agg.mean);
                }
                Err(e) => {
                    warnings.push(format!(
                        "human labels unavailable for {}: {e}",
                        dataset.dataset_id()
                    ));
                    ok = false;
                    break;
                }
            }
        }
        ok.then_some(means)
    };
    let human_order = human_means
        .as_ref()
        .map(|means| induce_order("human", Polarity::Similarity, means));

    let mut reports = Vec::new();
    let mut orders = Vec::new();
    for metric in registry {
        let mut means = BTreeMap::new();
        let mut complete = true;
        for dataset in study.datasets() {
            let id = dataset.dataset_id();
            match grid.scores(&metric.name, id) {
                Some(scores) => match summarize(&metric.name, id, scores) {
                    Ok(summary) => {
                        means.insert(id.to_string(), summary.mean);
                    }
                    Err(e) => {
                        warnings.push(format!("{} on {id}: {e}", metric.name));
                        complete = false;
                    }
                },
                None => {
                    warnings.push(format!("{} on {id}: not scored", metric.name));
                    complete = false;
                }
            }
        }
        if !complete {
            warnings.push(format!(
                "{}: skipped from order analysis (incomplete coverage)",
                metric.name
            ));
            continue;
        }
        let order = induce_order(&metric.name, metric.polarity, &means);

        let inequality_violations = match check_inequalities(metric.polarity, &means, study) {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{}: floor check unavailable: {e}", metric.name));
                None
            }
        };
        let variability = match variability(&means, study) {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{}: variability unavailable: {e}", metric.name));
                None
            }
        };

        let mut pearson_human = None;
        let mut pearson_pairs = None;
        let mut order_corr = None;
        let mut tau = None;
        let mut coincidence = None;
        let mut swaps = None;
        if let (Some(h_means), Some(h_order)) = (&human_means, &human_order) {
            match pearson_with_human(metric.polarity, &means, h_means) {
                Ok(r) => pearson_human = Some(r),
                Err(e) => warnings.push(format!(
                    "{}: dataset-level correlation unavailable: {e}",
                    metric.name
                )),
            }
            pearson_pairs = pair_level_pearson(study, grid, metric);
            order_corr = order_correlation(&order, h_order).ok();
            tau = order_tau(&order, h_order).ok();
            coincidence = rank_coincidence(&order, h_order).ok();
            swaps = swap_count(&order, h_order).ok();
        }

        reports.push(MetricReport {
            metric: metric.name.clone(),
            polarity: metric.polarity,
            dataset_means: means,
            induced_order: order.ranking.clone(),
            order_ties: order.has_ties,
            inequality_violations,
            pearson_with_human: pearson_human,
            pearson_pair_level: pearson_pairs,
            order_corr_with_human: order_corr,
            order_tau_with_human: tau,
            variability,
            rank_coincidence: coincidence,
            swap_count: swaps,
        });
        orders.push(order);
    }

    let k = orders.len();
    let mut matrix = vec![vec![0.0; k]; k];
    for i in 0..k {
        matrix[i][i] = 1.0;
        for j in i + 1..k {
            let rho = order_correlation(&orders[i], &orders[j])?;
            matrix[i][j] = rho;
            matrix[j][i] = rho;
        }
    }

    Ok(ComparisonReport {
        metric_names: orders.iter().map(|o| o.metric.clone()).collect(),
        metrics: reports,
        human_means,
        human_order: human_order.map(|o| o.ranking),
        order_corr_matrix: matrix,
        warnings,
    })
}

/// Pearson over pairs rather than datasets: polarity-normalized per-pair
/// metric values against per-pair mean human scores, pooled across datasets.
fn pair_level_pearson(study: &Study, grid: &ScoreGrid, metric: &MetricDescriptor) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for dataset in study.datasets() {
        let scores = grid.scores(&metric.name, dataset.dataset_id())?;
        let by_id: BTreeMap<&str, &PairScore> =
            scores.iter().map(|s| (s.pair_id.as_str(), s)).collect();
        for pair in dataset.pairs() {
            if let (Some(score), Some(human)) = (
                by_id.get(pair.pair_id()).and_then(|s| s.value),
                pair.mean_human(),
            ) {
                xs.push(metric.polarity.normalize(score));
                ys.push(human);
            }
        }
    }
    pearson(&xs, &ys).ok()
}
