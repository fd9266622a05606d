//! Embedding-based metrics: sentence-vector cosine distance, word-level
//! optimal transport, noun-pair distance, and scoring over ingested
//! contextual vectors.

use std::collections::BTreeMap;

use super::MetricError;
use crate::embeddings::{
    cosine, euclidean, sentence_embed_minmaxmean, ContextualPairVectors, EmbeddingError,
    EmbeddingTable,
};
use crate::textproc::{extract_nouns, NounLexicon, TokenSequence};
use crate::transport::{solve_transport, TransportProblem};

/// Cosine distance `1 - cos` between min/max/mean sentence vectors.
///
/// `None` when either side has no in-vocabulary token.
pub fn cosine_static(
    a: &TokenSequence,
    b: &TokenSequence,
    table: &EmbeddingTable,
) -> Result<Option<f64>, MetricError> {
    let va = match sentence_embed_minmaxmean(a, table) {
        Ok(v) => v,
        Err(EmbeddingError::AllOov) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let vb = match sentence_embed_minmaxmean(b, table) {
        Ok(v) => v,
        Err(EmbeddingError::AllOov) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let cos = cosine(&va.values, &vb.values)?;
    Ok(Some(1.0 - cos))
}

/// Normalized bag-of-words weights over unique in-vocabulary tokens, in
/// first-occurrence order.
fn nbow<'a>(tokens: &'a TokenSequence, table: &'a EmbeddingTable) -> Vec<(&'a [f64], f64)> {
    let mut order: Vec<(&str, &'a [f64], usize)> = Vec::new();
    for token in tokens.tokens() {
        let Some(vector) = table.lookup(token) else {
            continue;
        };
        match order.iter_mut().find(|(t, _, _)| *t == token.as_str()) {
            Some((_, _, count)) => *count += 1,
            None => order.push((token, vector, 1)),
        }
    }
    let total: usize = order.iter().map(|(_, _, c)| c).sum();
    order
        .into_iter()
        .map(|(_, v, c)| (v, c as f64 / total as f64))
        .collect()
}

/// Word mover's distance: minimum-cost transport between the two normalized
/// bag-of-words distributions under Euclidean ground cost between word
/// vectors.
///
/// `None` when either side has no in-vocabulary token.
pub fn wmd(
    a: &TokenSequence,
    b: &TokenSequence,
    table: &EmbeddingTable,
) -> Result<Option<f64>, MetricError> {
    let side_a = nbow(a, table);
    let side_b = nbow(b, table);
    if side_a.is_empty() || side_b.is_empty() {
        return Ok(None);
    }
    let supply: Vec<f64> = side_a.iter().map(|(_, w)| *w).collect();
    let demand: Vec<f64> = side_b.iter().map(|(_, w)| *w).collect();
    let mut cost = vec![vec![0.0; side_b.len()]; side_a.len()];
    for (i, (va, _)) in side_a.iter().enumerate() {
        for (j, (vb, _)) in side_b.iter().enumerate() {
            cost[i][j] = euclidean(va, vb)?;
        }
    }
    let problem = TransportProblem::new(supply, demand, cost)?;
    let plan = solve_transport(&problem)?;
    Ok(Some(plan.objective))
}

/// Noun-pair embedding distance.
///
/// Nouns are lexicon hits; out-of-vocabulary nouns are skipped. Each noun is
/// paired with its nearest counterpart on the other side and the two
/// directional means are averaged, so a sentence compared with itself is at
/// distance 0. `None` when either side has no embeddable noun.
pub fn pos_distance(
    a: &TokenSequence,
    b: &TokenSequence,
    lexicon: &NounLexicon,
    table: &EmbeddingTable,
) -> Result<Option<f64>, MetricError> {
    let vecs = |seq: &TokenSequence| -> Vec<&[f64]> {
        extract_nouns(seq, lexicon)
            .into_iter()
            .filter_map(|n| table.lookup(n))
            .collect()
    };
    let nouns_a = vecs(a);
    let nouns_b = vecs(b);
    if nouns_a.is_empty() || nouns_b.is_empty() {
        return Ok(None);
    }
    let directional = |from: &[&[f64]], to: &[&[f64]]| -> Result<f64, MetricError> {
        let mut sum = 0.0;
        for u in from {
            let mut best = f64::INFINITY;
            for v in to {
                best = best.min(euclidean(u, v)?);
            }
            sum += best;
        }
        Ok(sum / from.len() as f64)
    };
    let forward = directional(&nouns_a, &nouns_b)?;
    let backward = directional(&nouns_b, &nouns_a)?;
    Ok(Some((forward + backward) / 2.0))
}

/// Euclidean distance between the two ingested sentence-level vectors.
pub fn elmo_l2(pair_vecs: &ContextualPairVectors) -> Result<f64, MetricError> {
    let (Some(sa), Some(sb)) = (&pair_vecs.sent_a, &pair_vecs.sent_b) else {
        return Err(MetricError::MissingSentenceVectors {
            pair_id: pair_vecs.pair_id.clone(),
        });
    };
    Ok(euclidean(sa, sb)?)
}

/// Greedy-matching F score over per-token contextual vectors.
///
/// Recall is the (optionally idf-weighted) mean over reference tokens of the
/// best cosine against any candidate token; precision is symmetric; the
/// result is `2PR/(P+R)`, or 0 when either directional mean is non-positive
/// (no shared content to harmonically combine). Side `a` is the reference.
pub fn bert_score(
    pair_vecs: &ContextualPairVectors,
    idf: Option<&BTreeMap<String, f64>>,
) -> Result<f64, MetricError> {
    if pair_vecs.vecs_a.is_empty() || pair_vecs.vecs_b.is_empty() {
        return Err(MetricError::MissingTokenVectors {
            pair_id: pair_vecs.pair_id.clone(),
        });
    }
    let weight = |tokens: &[String], i: usize| -> f64 {
        idf.and_then(|m| tokens.get(i).and_then(|t| m.get(t)))
            .copied()
            .unwrap_or(1.0)
    };
    let best_against = |from: &[Vec<f64>], against: &[Vec<f64>]| -> Result<Vec<f64>, MetricError> {
        from.iter()
            .map(|u| {
                let mut best = f64::NEG_INFINITY;
                for v in against {
                    best = best.max(cosine(u, v)?);
                }
                Ok(best)
            })
            .collect()
    };
    let ref_best = best_against(&pair_vecs.vecs_a, &pair_vecs.vecs_b)?;
    let cand_best = best_against(&pair_vecs.vecs_b, &pair_vecs.vecs_a)?;
    let weighted_mean = |values: &[f64], tokens: &[String]| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, v) in values.iter().enumerate() {
            let w = weight(tokens, i);
            num += w * v;
            den += w;
        }
        num / den
    };
    let recall = weighted_mean(&ref_best, &pair_vecs.tokens_a);
    let precision = weighted_mean(&cand_best, &pair_vecs.tokens_b);
    if precision <= 0.0 || recall <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}
