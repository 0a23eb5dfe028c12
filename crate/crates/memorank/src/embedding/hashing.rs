//! Deterministic feature-hashing embedder: the offline default backend.
//!
//! Tokenizes on non-alphanumeric boundaries, lowercases, hashes each token
//! into `dimension` signed buckets with FNV-1a, and L2-normalizes the
//! counts. No model weights, no randomness: identical text yields an
//! identical vector on every platform and in every process.

use crate::embedding::{EmbeddingVector, ProviderKind, TextEmbedder};
use crate::error::{Error, Result};

pub struct HashingEmbedder {
    dimension: usize,
}

impl HashingEmbedder {
    pub const MODEL_ID: &'static str = "feature-hash-v1";

    /// Default width mirrors the sentence-encoder dimension used by the
    /// remote configuration.
    pub const DEFAULT_DIMENSION: usize = 384;

    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        Self { dimension }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Lowercased tokens split on non-alphanumeric boundaries.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

impl TextEmbedder for HashingEmbedder {
    fn kind(&self) -> ProviderKind {
        ProviderKind::DeterministicHashing
    }

    fn model_id(&self) -> &str {
        Self::MODEL_ID
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_text(&self, text: &str) -> Result<EmbeddingVector> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        let mut buckets = vec![0.0f64; self.dimension];
        let mut first_bucket = None;
        for token in tokenize(text) {
            let hash = fnv1a64(token.as_bytes());
            let idx = (hash % self.dimension as u64) as usize;
            let sign = if (hash >> 32) & 1 == 1 { 1.0 } else { -1.0 };
            buckets[idx] += sign;
            first_bucket.get_or_insert(idx);
        }
        let norm_sq: f64 = buckets.iter().map(|v| v * v).sum();
        if norm_sq == 0.0 {
            // Signed counts can cancel exactly; keep the vector usable by
            // pinning the first token's bucket.
            let idx = first_bucket.ok_or(Error::EmptyText)?;
            buckets[idx] = 1.0;
        } else {
            let inv = norm_sq.sqrt().recip();
            for v in buckets.iter_mut() {
                *v *= inv;
            }
        }
        EmbeddingVector::new(buckets)
    }
}
