//! Deterministic keyed generator.
//!
//! Every piece of keyed randomness in the crate (scramble permutations, rule
//! schedules, hybrid matrices, pixel sampling) is drawn from SplitMix64 so that
//! keys and reports are reproducible by any other implementation:
//!
//! ```text
//! next():  state = state + 0x9E3779B97F4A7C15          (wrapping)
//!          z = state
//!          z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     (wrapping)
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB     (wrapping)
//!          return z ^ (z >> 31)
//! ```
//!
//! `mix64(x)` is the output function above applied to `x` without the state
//! increment. Sub-stream seeds are derived with
//! `derive_seed(seed, [t1, t2, ..]) = fold(mix64(seed), |acc, t| mix64(acc ^ mix64(t + GAMMA)))`.
//!
//! `below(n)` is unbiased: draw `x = next()`, reject while
//! `x >= (u64::MAX / n) * n`, return `x % n`. Shuffles are Durstenfeld's
//! Fisher–Yates: for `i` from `len - 1` down to `1`, swap `i` with `below(i + 1)`.

/// Weyl increment of SplitMix64.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn mix64(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-stream seed from `seed` and a tag path.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix64(seed), |acc, &t| {
        mix64(acc ^ mix64(t.wrapping_add(GAMMA)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Top bit of the next output.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform integer in `0..n`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) has no valid output");
        let limit = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A uniformly random permutation of `0..len`.
    pub fn permutation(&mut self, len: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..len).collect();
        self.shuffle(&mut p);
        p
    }
}
