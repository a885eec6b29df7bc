//! Seeded deterministic random number generation.
//!
//! All stochastic code in the crate draws from [`SeededRng`], a ChaCha8
//! stream cipher generator: identical seeds give identical streams on every
//! platform. Child generators are derived with a SplitMix64 hash chain so a
//! corpus seed splits into per-texture and per-version seeds and any clip is
//! regenerable in isolation.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the generator algorithm, recorded in manifests and reports.
pub const RNG_ALGORITHM: &str = "chacha8";

/// SplitMix64 finalizer; used for seed derivation and lattice hashing.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_label(label: &str) -> u64 {
    // FNV-1a over the label bytes.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic seeded generator with hierarchical derivation.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed this generator was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive the seed of a child stream without constructing it.
    pub fn derive_seed(parent: u64, label: &str, index: u64) -> u64 {
        splitmix64(parent ^ hash_label(label) ^ splitmix64(index))
    }

    /// Child generator for a named sub-stream. Independent children never
    /// share state with the parent or each other.
    pub fn child(&self, label: &str, index: u64) -> SeededRng {
        SeededRng::new(Self::derive_seed(self.seed, label, index))
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.gen_range(lo..hi)
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        use rand_distr::{Distribution, StandardNormal};
        StandardNormal.sample(&mut self.inner)
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn normal_scaled(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.normal()
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
