//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and a 64-bit
//! stream id. ChaCha is a counter-based cipher, so the output depends only on
//! `(seed, stream, position)` and is identical on every platform. Trials take
//! `seed = base + trial` and carve out one stream per consumer.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Well-known stream ids inside one trial.
pub mod streams {
    /// Initial solution / population. Shared by every AOS mode.
    pub const INIT: u64 = 1;
    /// Module choice: exactly one uniform per controller step.
    pub const MODULE: u64 = 2;
    /// Operator selection inside either module.
    pub const OPERATOR: u64 = 3;
    /// Operator application (donor choice, move arguments, crossover).
    pub const ENGINE: u64 = 4;
    /// Replay sampling and network initialisation.
    pub const LEARNING: u64 = 5;
    /// Benchmark shift vectors.
    pub const SHIFT: u64 = 6;
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A sibling stream with the same seed.
    pub fn substream(&self, stream: u64) -> Self {
        Self::new(self.seed, stream)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[0, n)`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.inner.random_range(0..n)
    }

    /// Standard normal draw (Box-Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// `count` distinct indices from `[0, n)`, all different from `exclude`.
    pub fn distinct_excluding(&mut self, n: usize, count: usize, exclude: usize) -> Vec<usize> {
        let mut picked = Vec::with_capacity(count);
        while picked.len() < count {
            let i = self.below(n);
            if i != exclude && !picked.contains(&i) {
                picked.push(i);
            }
        }
        picked
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42, 3);
        let mut b = RngStream::new(42, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(42, 1);
        let mut b = RngStream::new(42, 2);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn distinct_excluding_is_distinct() {
        let mut r = RngStream::new(1, 1);
        for _ in 0..200 {
            let v = r.distinct_excluding(6, 5, 2);
            assert!(!v.contains(&2));
            let mut s = v.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 5);
        }
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut r = RngStream::new(9, 0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
