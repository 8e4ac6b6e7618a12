//! Portable seeded randomness.
//!
//! The generator is xoshiro256** (Blackman & Vigna), with its 256-bit state
//! filled from the 64-bit seed by four successive SplitMix64 outputs. Bounded
//! integers use Lemire's multiply-and-reject reduction:
//!
//! ```text
//! threshold = (2^64 - n) mod n
//! loop { x = next_u64(); m = x * n (128-bit); if low64(m) >= threshold { return high64(m) } }
//! ```
//!
//! and unit floats are `(next_u64() >> 11) * 2^-53`. Both are fixed here so
//! that ports in other languages reproduce the same selections.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// SplitMix64 output function applied to `state + golden gamma`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    /// Independent stream for one frame, so frames can be processed in any
    /// order (or in parallel) without changing results.
    pub fn for_frame(seed: u64, sequence_id: u64, frame_id: u64) -> Self {
        let mut h = splitmix64(seed);
        h = splitmix64(h ^ sequence_id);
        h = splitmix64(h ^ frame_id.rotate_left(32));
        Self::new(h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(n);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn below_usize(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform float in `[0, 1)`.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(seed: u64, n: usize) -> Vec<u64> {
        let mut rng = SeededRng::new(seed);
        (0..n).map(|_| rng.next_u64()).collect()
    }

    #[test]
    fn same_seed_same_stream() {
        assert_eq!(draws(7, 100), draws(7, 100));
    }

    #[test]
    fn different_seeds_diverge_early() {
        let a = draws(7, 10);
        let b = draws(8, 10);
        assert!(a.iter().zip(&b).any(|(x, y)| x != y));
    }

    #[test]
    fn reference_stream_is_stable() {
        // xoshiro256** seeded through SplitMix64; frozen so any change to the
        // generator is caught.
        let mut rng = SeededRng::new(0);
        let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        assert_eq!(first, REFERENCE_SEED0);
    }

    const REFERENCE_SEED0: [u64; 3] = [11091344671253066420, 13793997310169335082, 1900383378846508768];

    #[test]
    fn bounded_draws_are_chi_square_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let bins = 10usize;
        let total = 100_000usize;
        for seed in [1u64, 42, 0xDEAD_BEEF] {
            let mut rng = SeededRng::new(seed);
            let mut counts = vec![0usize; bins];
            for _ in 0..total {
                counts[rng.below_usize(bins)] += 1;
            }
            let expected = total as f64 / bins as f64;
            let stat: f64 = counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
            assert!(stat < critical, "seed {seed}: chi2 {stat} >= {critical}");
        }
    }

    #[test]
    fn frame_streams_are_independent_of_order() {
        let mut a = SeededRng::for_frame(5, 1, 2);
        let mut b = SeededRng::for_frame(5, 1, 2);
        let mut c = SeededRng::for_frame(5, 2, 1);
        assert_eq!(a.next_u64(), b.next_u64());
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn unit_floats_in_range() {
        let mut rng = SeededRng::new(3);
        for _ in 0..1000 {
            let u = rng.unit_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
