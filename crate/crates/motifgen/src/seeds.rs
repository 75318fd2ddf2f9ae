//! Stable derivation of per-stage RNG seeds from a master seed.

use sha2::{Digest, Sha256};

/// Derives an independent sub-seed from `(seed, tag, index)`.
///
/// Hash-based so the mapping is stable across platforms and releases;
/// reordering pipeline stages never changes another stage's stream.
pub fn derive(seed: u64, tag: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
