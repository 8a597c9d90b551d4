//! Deterministic, forkable random streams.
//!
//! Every stochastic component draws from an [`RngStream`] derived from a
//! root seed plus a structured key (a label and an index). Identical
//! `(root_seed, key path)` pairs yield identical draw sequences no matter
//! how work is scheduled across threads, which is what makes whole
//! benchmark runs reproducible byte-for-byte.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// A point in the deterministic stream tree.
///
/// Streams are cheap value types: forking hashes the parent seed together
/// with the child key, so sibling streams are statistically independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    seed: [u8; 32],
}

impl RngStream {
    /// Root stream for a 64-bit experiment seed.
    pub fn from_root(root_seed: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(b"adbench.root");
        hasher.update(root_seed.to_le_bytes());
        Self { seed: hasher.finalize().into() }
    }

    /// Derives an independent child stream for `(label, index)`.
    pub fn fork(&self, label: &str, index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(self.seed);
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
        Self { seed: hasher.finalize().into() }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.seed)
    }
}
