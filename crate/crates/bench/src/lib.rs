//! Synthetic workload generators shared by the benchmark targets.

use semsim_core::embeddings::EmbeddingTable;
use semsim_core::rng::SplitMix64;
use semsim_core::textproc::TokenSequence;
use semsim_core::transport::TransportProblem;

/// Balanced transportation instance with `side` supply and demand points.
pub fn transport_instance(side: usize, seed: u64) -> TransportProblem {
    let mut rng = SplitMix64::new(seed);
    let masses = |rng: &mut SplitMix64| -> Vec<f64> {
        let raw: Vec<f64> = (0..side).map(|_| 0.05 + rng.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    };
    let supply = masses(&mut rng);
    let demand = masses(&mut rng);
    let cost: Vec<Vec<f64>> = (0..side)
        .map(|_| (0..side).map(|_| rng.next_f64()).collect())
        .collect();
    TransportProblem::new(supply, demand, cost).expect("valid instance")
}

/// Embedding table over a `w{i}` vocabulary.
pub fn vocab_table(vocab: usize, dim: usize, seed: u64) -> EmbeddingTable {
    let mut rng = SplitMix64::new(seed);
    let mut table = EmbeddingTable::new("bench", dim);
    for i in 0..vocab {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        v[0] += 2.0;
        table.insert(&format!("w{i}"), v).expect("dimensions match");
    }
    table
}

/// Random sentence of `len` tokens drawn from a `vocab`-word vocabulary.
pub fn sentence(len: usize, vocab: usize, rng: &mut SplitMix64) -> TokenSequence {
    let words: Vec<String> = (0..len)
        .map(|_| format!("w{}", rng.next_below(vocab as u64)))
        .collect();
    TokenSequence::from_tokens(words).expect("non-empty tokens")
}

/// A batch of sentence pairs for metric benchmarks.
pub fn sentence_pairs(
    count: usize,
    len: usize,
    vocab: usize,
    seed: u64,
) -> Vec<(TokenSequence, TokenSequence)> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            (
                sentence(len, vocab, &mut rng),
                sentence(len, vocab, &mut rng),
            )
        })
        .collect()
}
