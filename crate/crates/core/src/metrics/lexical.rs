//! Surface-form metrics: token overlap, n-gram precision/recall families,
//! character n-gram F-score, and alignment-based unigram matching.

use std::collections::HashSet;

use super::MetricError;
use crate::textproc::{char_ngrams, porter_stem, word_ngrams, SynonymMap, TokenSequence};

/// Jaccard index over the unique token sets of the two sentences.
pub fn word_overlap(a: &TokenSequence, b: &TokenSequence) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    let set_a: HashSet<&str> = a.tokens().iter().map(String::as_str).collect();
    let set_b: HashSet<&str> = b.tokens().iter().map(String::as_str).collect();
    let intersection = set_a.intersection(&set_b).count();
    let union = set_a.union(&set_b).count();
    Ok(intersection as f64 / union as f64)
}

/// Character n-gram F-beta score.
///
/// For each order `n` in `1..=max_n` where at least one side has an n-gram,
/// clipped-match precision and recall are computed over whitespace-stripped,
/// lowercased character n-grams; orders where both sides are too short are
/// skipped so that identical texts always score 1. Precision and recall are
/// averaged across counted orders and combined as
/// `(1 + beta^2) P R / (beta^2 P + R)`, with 0 when nothing matches.
pub fn chrf(a: &str, b: &str, max_n: usize, beta: f64) -> Result<f64, MetricError> {
    if a.trim().is_empty() || b.trim().is_empty() {
        return Err(MetricError::EmptySequence);
    }
    if max_n == 0 {
        return Err(MetricError::ZeroOrder);
    }
    let a = a.to_lowercase();
    let b = b.to_lowercase();
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut orders = 0usize;
    let mut any_match = false;
    for n in 1..=max_n {
        let grams_a = char_ngrams(&a, n)?;
        let grams_b = char_ngrams(&b, n)?;
        let total_a: usize = grams_a.values().sum();
        let total_b: usize = grams_b.values().sum();
        if total_a == 0 && total_b == 0 {
            continue;
        }
        let matches: usize = grams_b
            .iter()
            .map(|(g, &c)| c.min(grams_a.get(g).copied().unwrap_or(0)))
            .sum();
        if matches > 0 {
            any_match = true;
        }
        precision_sum += if total_b > 0 {
            matches as f64 / total_b as f64
        } else {
            0.0
        };
        recall_sum += if total_a > 0 {
            matches as f64 / total_a as f64
        } else {
            0.0
        };
        orders += 1;
    }
    if !any_match || orders == 0 {
        return Ok(0.0);
    }
    let p = precision_sum / orders as f64;
    let r = recall_sum / orders as f64;
    let beta2 = beta * beta;
    Ok((1.0 + beta2) * p * r / (beta2 * p + r))
}

/// Sentence-level unsmoothed BLEU.
///
/// Geometric mean of clipped n-gram precisions for orders `1..=max_n`,
/// capped at the shorter sentence length so self-comparison of short
/// sentences is still 1, times the brevity penalty
/// `min(1, exp(1 - reference_len / candidate_len))`. Any zero precision
/// zeroes the score.
pub fn bleu(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    max_n: usize,
) -> Result<f64, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    if max_n == 0 {
        return Err(MetricError::ZeroOrder);
    }
    let orders = max_n.min(candidate.len()).min(reference.len());
    let mut product = 1.0f64;
    for n in 1..=orders {
        let cand_grams = word_ngrams(candidate, n)?;
        let ref_grams = word_ngrams(reference, n)?;
        let total: usize = cand_grams.values().sum();
        let clipped: usize = cand_grams
            .iter()
            .map(|(g, &c)| c.min(ref_grams.get(g).copied().unwrap_or(0)))
            .sum();
        if clipped == 0 {
            return Ok(0.0);
        }
        product *= clipped as f64 / total as f64;
    }
    let geo_mean = product.powf(1.0 / orders as f64);
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    Ok(geo_mean * bp)
}

/// Which statistic `rouge_n` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RougeMode {
    Recall,
    F1,
}

/// N-gram recall (or F1) of the candidate against the reference.
pub fn rouge_n(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    n: usize,
    mode: RougeMode,
) -> Result<f64, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    if n == 0 {
        return Err(MetricError::ZeroOrder);
    }
    if reference.len() < n {
        return Err(MetricError::ReferenceTooShort {
            order: n,
            got: reference.len(),
        });
    }
    let (_, recall, f1) = rouge_n_parts(candidate, reference, n)?;
    Ok(match mode {
        RougeMode::Recall => recall,
        RougeMode::F1 => f1,
    })
}

/// Clipped n-gram precision, recall and F1 of candidate against reference.
fn rouge_n_parts(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    n: usize,
) -> Result<(f64, f64, f64), MetricError> {
    let cand_grams = word_ngrams(candidate, n)?;
    let ref_grams = word_ngrams(reference, n)?;
    let cand_total: usize = cand_grams.values().sum();
    let ref_total: usize = ref_grams.values().sum();
    let clipped: usize = cand_grams
        .iter()
        .map(|(g, &c)| c.min(ref_grams.get(g).copied().unwrap_or(0)))
        .sum();
    let precision = if cand_total > 0 {
        clipped as f64 / cand_total as f64
    } else {
        0.0
    };
    let recall = if ref_total > 0 {
        clipped as f64 / ref_total as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((precision, recall, f1))
}

fn lcs_length(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            curr[j + 1] = if ai == bj {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Longest-common-subsequence F1: `R = LCS/|ref|`, `P = LCS/|cand|`,
/// `F = 2PR/(P+R)`, 0 when the LCS is empty.
pub fn rouge_l(candidate: &TokenSequence, reference: &TokenSequence) -> Result<f64, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    let lcs = lcs_length(candidate.tokens(), reference.tokens()) as f64;
    if lcs == 0.0 {
        return Ok(0.0);
    }
    let p = lcs / candidate.len() as f64;
    let r = lcs / reference.len() as f64;
    Ok(2.0 * p * r / (p + r))
}

/// Staged unigram alignment score.
///
/// Candidate tokens are aligned to reference tokens in three stages — exact
/// surface match, shared Porter stem, then synonym-map relation — each stage
/// considering only still-unmatched tokens and taking the leftmost available
/// reference token. With `m` matches, `P = m/|cand|`, `R = m/|ref|`,
/// `F = 10PR/(R + 9P)`; the chunk penalty is `0.5 (chunks/m)^3` over maximal
/// runs that are contiguous and increasing on both sides; the score is
/// `F (1 - penalty)`, and 0 when nothing aligns.
pub fn meteor(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    synonyms: Option<&SynonymMap>,
) -> Result<f64, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    let cand = candidate.tokens();
    let refr = reference.tokens();
    // alignment[ci] = reference index matched to candidate token ci
    let mut alignment: Vec<Option<usize>> = vec![None; cand.len()];
    let mut ref_taken = vec![false; refr.len()];

    let run_stage = |alignment: &mut Vec<Option<usize>>,
                     ref_taken: &mut Vec<bool>,
                     matches: &dyn Fn(&str, &str) -> bool| {
        for (ci, ct) in cand.iter().enumerate() {
            if alignment[ci].is_some() {
                continue;
            }
            for (ri, rt) in refr.iter().enumerate() {
                if !ref_taken[ri] && matches(ct, rt) {
                    alignment[ci] = Some(ri);
                    ref_taken[ri] = true;
                    break;
                }
            }
        }
    };

    run_stage(&mut alignment, &mut ref_taken, &|c, r| c == r);
    run_stage(&mut alignment, &mut ref_taken, &|c, r| {
        porter_stem(c) == porter_stem(r)
    });
    if let Some(map) = synonyms {
        run_stage(&mut alignment, &mut ref_taken, &|c, r| map.related(c, r));
    }

    let matched: Vec<(usize, usize)> = alignment
        .iter()
        .enumerate()
        .filter_map(|(ci, r)| r.map(|ri| (ci, ri)))
        .collect();
    let m = matched.len();
    if m == 0 {
        return Ok(0.0);
    }
    let p = m as f64 / cand.len() as f64;
    let r = m as f64 / refr.len() as f64;
    let f = 10.0 * p * r / (r + 9.0 * p);
    let mut chunks = 1usize;
    for w in matched.windows(2) {
        let (c0, r0) = w[0];
        let (c1, r1) = w[1];
        if !(c1 == c0 + 1 && r1 == r0 + 1) {
            chunks += 1;
        }
    }
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    Ok(f * (1.0 - penalty))
}
