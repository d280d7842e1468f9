//! Counter-based random streams.
//!
//! Every draw is a pure function of a [`StreamKey`]: the key material is
//! hashed into a 64-bit word, so the exploration algorithms and the direct
//! process can read the same edge indicator for a vertex pair regardless of
//! the order in which they visit it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// What a stream is used for. Part of the key so that different consumers
/// never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamPurpose {
    EdgePair,
    Permutation,
    BinomialDraw,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::EdgePair => 0x4544_4745,
            StreamPurpose::Permutation => 0x5045_524d,
            StreamPurpose::BinomialDraw => 0x4249_4e4f,
        }
    }
}

/// The `(base_seed, replication)` pair every stream of one run derives from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SeedBasis {
    pub base_seed: u64,
    pub replication: u64,
}

impl SeedBasis {
    pub fn new(base_seed: u64, replication: u64) -> Self {
        Self {
            base_seed,
            replication,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub base_seed: u64,
    pub replication: u64,
    pub purpose: StreamPurpose,
    pub index_a: u64,
    pub index_b: u64,
}

impl StreamKey {
    pub fn new(seed: SeedBasis, purpose: StreamPurpose, index_a: u64, index_b: u64) -> Self {
        Self {
            base_seed: seed.base_seed,
            replication: seed.replication,
            purpose,
            index_a,
            index_b,
        }
    }

    /// Key of the unordered vertex pair `{u, v}`; stored with `index_a < index_b`.
    pub fn edge(seed: SeedBasis, u: usize, v: usize) -> Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Self::new(seed, StreamPurpose::EdgePair, a as u64, b as u64)
    }

    /// Key of the `step`-th Fisher–Yates draw.
    pub fn permutation(seed: SeedBasis, step: usize) -> Self {
        Self::new(seed, StreamPurpose::Permutation, step as u64, 0)
    }

    pub fn seed(&self) -> SeedBasis {
        SeedBasis::new(self.base_seed, self.replication)
    }

    /// 64-bit digest of the key.
    pub fn digest(&self) -> u64 {
        let mut h = mix64(self.base_seed ^ 0x243f_6a88_85a3_08d3);
        for (salt, word) in [
            (0x1319_8a2e_0370_7344u64, self.replication),
            (0xa409_3822_299f_31d0, self.purpose.tag()),
            (0x082e_fa98_ec4e_6c89, self.index_a),
            (0x4528_21e6_38d0_1377, self.index_b),
        ] {
            h = mix64(h ^ mix64(word.wrapping_add(salt)));
        }
        h
    }
}

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw on `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform01(key: &StreamKey) -> f64 {
    (key.digest() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `true` iff `uniform01(key) < p`.
pub fn bernoulli(key: &StreamKey, p: f64) -> Result<bool> {
    check_probability(p)?;
    Ok(uniform01(key) < p)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} outside [0, 1]")))
    }
}

/// Sequential generator seeded from a key, for consumers that read a whole
/// stream in order (binomial draws of the counts chain).
pub fn stream_rng(key: &StreamKey) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key.digest())
}
