//! Seed derivation.
//!
//! Every random stream in a run is derived from a single base seed by a
//! counter-based mixer, so a replica can be re-run in isolation:
//!
//! ```text
//! replica_seed(base, i)  = mix64(base ^ mix64(i + 0x9E3779B97F4A7C15))
//! stream_seed(seed, tag) = mix64(seed ^ mix64(tag) ^ 0xD1B54A32D192ED03)
//! ```
//!
//! `mix64` is the SplitMix64 finalizer. Generators are xoshiro256++ seeded
//! through `SeedableRng::seed_from_u64`.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SimRng = Xoshiro256PlusPlus;

/// Named sub-streams of a replica seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Environment = 1,
    GreenClock = 2,
    GreenKernel = 3,
    Auxiliary = 4,
}

pub const fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const fn replica_seed(base: u64, replica: u64) -> u64 {
    mix64(base ^ mix64(replica.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

pub const fn stream_seed(seed: u64, stream: Stream) -> u64 {
    mix64(seed ^ mix64(stream as u64) ^ 0xD1B5_4A32_D192_ED03)
}

pub fn rng_for(seed: u64, stream: Stream) -> SimRng {
    SimRng::seed_from_u64(stream_seed(seed, stream))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Uniform integer in `0..n` by multiply-and-reject; the rejection branch,
/// which needs a division, is taken with probability below `n / 2^64`.
#[inline]
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    debug_assert!(n > 0);
    let mut m = rng.next_u64() as u128 * n as u128;
    if (m as u64) < n {
        let floor = n.wrapping_neg() % n;
        while (m as u64) < floor {
            m = rng.next_u64() as u128 * n as u128;
        }
    }
    (m >> 64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn uniform_below_is_flat() {
        let mut rng = rng_from_seed(5);
        let mut tally = [0u32; 7];
        for _ in 0..70_000 {
            tally[uniform_below(&mut rng, 7) as usize] += 1;
        }
        assert!(tally.iter().all(|&c| (9_400..10_600).contains(&c)), "{tally:?}");
    }

    #[test]
    fn replica_seeds_are_distinct() {
        let seeds: HashSet<u64> = (0..10_000).map(|i| replica_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn streams_differ() {
        let s = replica_seed(7, 3);
        assert_ne!(
            stream_seed(s, Stream::Environment),
            stream_seed(s, Stream::GreenClock)
        );
    }
}
