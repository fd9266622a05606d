//! Portable deterministic random number generation.
//!
//! Every randomized operation in this crate (dataset sampling, random-pair
//! construction) is driven by [`SplitMix64`], so a `(input, seed)` pair
//! reproduces bit-identical results on any platform and in any
//! reimplementation that follows the same recipe.
//!
//! The generator is the standard SplitMix64 sequence: the state advances by
//! `0x9E3779B97F4A7C15` per draw and the output is the finalizer
//!
//! ```text
//! z = state;
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//! output = z ^ (z >> 31);
//! ```
//!
//! Bounded draws use plain modulo reduction: `next_below(k) = next_u64() % k`.
//! The modulo bias is below 2^-32 for every bound used in this crate and the
//! rule is trivial to replay by hand, which is what the reproducibility
//! contract needs.

/// SplitMix64 pseudo-random generator with 64 bits of state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Create a generator from a seed. Equal seeds give equal sequences.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Next value in `0..bound` via modulo reduction.
    ///
    /// Panics when `bound == 0`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        self.next_u64() % bound
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Partial Fisher-Yates selection: returns `n` distinct indices out of
/// `0..len`, in draw order.
///
/// The recipe is fixed: start from the identity index vector, then for each
/// `k` in `0..n` swap position `k` with position `k + rng.next_below(len - k)`.
/// The first `n` positions are the selection.
pub fn select_indices(len: usize, n: usize, rng: &mut SplitMix64) -> Vec<usize> {
    assert!(n <= len, "cannot select {n} out of {len}");
    let mut idx: Vec<usize> = (0..len).collect();
    for k in 0..n {
        let r = rng.next_below((len - k) as u64) as usize;
        idx.swap(k, k + r);
    }
    idx.truncate(n);
    idx
}
