//! Helpers shared by the integration test binaries.

use semsim_core::rng::SplitMix64;
use semsim_core::transport::TransportProblem;

/// Denominator for dyadic marginals: masses are integer multiples of
/// 2^-20, so marginal sums, north-west-corner subtractions and simplex
/// pivots are all exact in f64 and both marginals sum to exactly 1.
pub const DYADIC_DENOM: u64 = 1 << 20;

/// Split unit mass into `parts` positive dyadic masses summing to exactly 1.
pub fn dyadic_masses(parts: usize, rng: &mut SplitMix64) -> Vec<f64> {
    assert!(parts >= 1 && (parts as u64) < DYADIC_DENOM);
    let mut cuts: Vec<u64> = vec![0, DYADIC_DENOM];
    while cuts.len() < parts + 1 {
        let c = 1 + rng.next_below(DYADIC_DENOM - 1);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| (w[1] - w[0]) as f64 / DYADIC_DENOM as f64)
        .collect()
}

/// Random balanced instance with dyadic marginals and costs in [0, 1).
pub fn random_problem(max_side: usize, rng: &mut SplitMix64) -> TransportProblem {
    let m = 1 + rng.next_below(max_side as u64) as usize;
    let n = 1 + rng.next_below(max_side as u64) as usize;
    let supply = dyadic_masses(m, rng);
    let demand = dyadic_masses(n, rng);
    let cost: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.next_f64()).collect())
        .collect();
    TransportProblem::new(supply, demand, cost).expect("generated instance is valid")
}
