//! Seeded, splittable randomness.
//!
//! Every random choice in the crate is drawn from a [`Substream`]: a ChaCha8
//! generator keyed by the run seed and selected by a *path* such as
//! `"st/e1"` or `"boost/round/17"`. Two substreams with different paths are
//! independent, and re-deriving a path always reproduces the same sequence,
//! so regenerating one stage never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A reproducible handle on one named substream of a run seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substream {
    pub seed: u64,
    pub path: String,
}

impl Substream {
    pub fn root(seed: u64) -> Self {
        Substream {
            seed,
            path: String::new(),
        }
    }

    /// Child substream `self.path/label`.
    pub fn child(&self, label: impl AsRef<str>) -> Self {
        let path = if self.path.is_empty() {
            label.as_ref().to_string()
        } else {
            format!("{}/{}", self.path, label.as_ref())
        };
        Substream {
            seed: self.seed,
            path,
        }
    }

    pub fn indexed(&self, label: &str, index: usize) -> Self {
        self.child(format!("{label}/{index}"))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        let digest = Sha256::digest(self.path.as_bytes());
        let mut stream = [0u8; 8];
        stream.copy_from_slice(&digest[..8]);
        rng.set_stream(u64::from_le_bytes(stream));
        rng
    }
}
