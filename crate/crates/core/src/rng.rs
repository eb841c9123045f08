//! Random streams for the simulator.
//!
//! Every run draws from a ChaCha8 stream seeded with the run's 64-bit seed
//! (`ChaCha8Rng::seed_from_u64`). Draws are derived from raw `u64` words with
//! fixed formulas so that outputs do not depend on a particular `rand`
//! sampling implementation:
//!
//! * a uniform real in `[0, 1)` takes the top 53 bits of one word times `2^-53`;
//! * a uniform index below `n` uses Lemire's multiply-shift with rejection.
//!
//! Child seeds for sweep replicates come from a SplitMix64 chain over the
//! base seed and the cell coordinates.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Deterministic random stream used by one simulation run.
#[derive(Debug, Clone)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

/// Draws an ordered pair of distinct agent indices, uniform over all
/// `n * (n - 1)` possibilities.
pub fn sample_pair(rng: &mut SimRng, n: usize) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(invalid(format!("pair sampling needs at least 2 agents, got {n}")));
    }
    Ok(sample_pair_unchecked(rng, n))
}

#[inline]
pub(crate) fn sample_pair_unchecked(rng: &mut SimRng, n: usize) -> (usize, usize) {
    let i = rng.below(n as u64) as usize;
    let mut j = rng.below(n as u64 - 1) as usize;
    if j >= i {
        j += 1;
    }
    (i, j)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a base seed and a list of coordinates.
pub fn derive_seed(base: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(base), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}
