//! Text embeddings and cosine similarity.
//!
//! Three providers share one trait: a deterministic feature-hashing embedder
//! (the offline default), a cache-only provider serving precomputed vectors,
//! and a remote HTTP client. A content-addressed disk cache can wrap any of
//! them without changing results.

mod cache;
mod hashing;
mod remote;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cache::EmbeddingCache;
pub use hashing::{tokenize, HashingEmbedder};
pub use remote::RemoteEmbedder;

use crate::error::{Error, Result};

/// Fixed-length vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEmbedding);
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cosine similarity, clamped to [-1, 1] against floating-point drift.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    let norm_a = a.norm();
    let norm_b = b.norm();
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::ZeroNormVector);
    }
    let dot: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    Ok((dot / (norm_a * norm_b)).clamp(-1.0, 1.0))
}

/// Provider families. Part of every cache key, so vectors from different
/// providers never alias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    DeterministicHashing,
    FileCache,
    Remote,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::DeterministicHashing => "hashing",
            ProviderKind::FileCache => "file-cache",
            ProviderKind::Remote => "remote",
        }
    }
}

/// Declarative provider configuration, resolvable into an [`EmbeddingService`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingProviderConfig {
    pub kind: ProviderKind,
    pub model_id: String,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
}

impl EmbeddingProviderConfig {
    pub fn hashing(dimension: usize) -> Self {
        Self {
            kind: ProviderKind::DeterministicHashing,
            model_id: HashingEmbedder::MODEL_ID.to_string(),
            dimension,
            endpoint: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be > 0".into()));
        }
        if self.kind == ProviderKind::Remote && self.endpoint.is_none() {
            return Err(Error::InvalidConfig(
                "remote embedding provider requires an endpoint".into(),
            ));
        }
        Ok(())
    }
}

/// A text-embedding provider.
pub trait TextEmbedder: Send + Sync {
    fn kind(&self) -> ProviderKind;
    fn model_id(&self) -> &str;
    fn dimension(&self) -> usize;
    fn embed_text(&self, text: &str) -> Result<EmbeddingVector>;

    /// Batch hook; remote providers override this with one round trip.
    fn embed_many(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        texts.iter().map(|t| self.embed_text(t)).collect()
    }
}

/// Provider plus optional disk cache. The service is the embedding entry
/// point for the rest of the crate.
#[derive(Clone)]
pub struct EmbeddingService {
    provider: Arc<dyn TextEmbedder>,
    cache: Option<Arc<EmbeddingCache>>,
}

impl EmbeddingService {
    pub fn new(provider: Arc<dyn TextEmbedder>, cache: Option<Arc<EmbeddingCache>>) -> Self {
        Self { provider, cache }
    }

    /// Deterministic hashing service without a cache.
    pub fn hashing(dimension: usize) -> Self {
        Self::new(Arc::new(HashingEmbedder::new(dimension)), None)
    }

    pub fn dimension(&self) -> usize {
        self.provider.dimension()
    }

    pub fn provider(&self) -> &Arc<dyn TextEmbedder> {
        &self.provider
    }

    fn cache_key(&self, text: &str) -> String {
        EmbeddingCache::key(
            self.provider.kind(),
            self.provider.model_id(),
            self.provider.dimension(),
            text,
        )
    }

    pub fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        if let Some(cache) = &self.cache {
            let key = self.cache_key(text);
            if let Some(hit) = cache.get(&key)? {
                return Ok(hit);
            }
            let vector = self.provider.embed_text(text)?;
            cache.put(&key, &vector)?;
            return Ok(vector);
        }
        self.provider.embed_text(text)
    }

    /// Order-preserving batch embedding. Cache hits short-circuit provider
    /// calls; misses go to the provider's batch hook in one pass.
    pub fn embed_batch<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<EmbeddingVector>> {
        for (index, text) in texts.iter().enumerate() {
            if text.as_ref().trim().is_empty() {
                return Err(Error::BatchItem {
                    index,
                    source: Box::new(Error::EmptyText),
                });
            }
        }
        let mut out: Vec<Option<EmbeddingVector>> = vec![None; texts.len()];
        let mut miss_indices = Vec::new();
        if let Some(cache) = &self.cache {
            for (i, text) in texts.iter().enumerate() {
                let key = self.cache_key(text.as_ref());
                match cache.get(&key)? {
                    Some(hit) => out[i] = Some(hit),
                    None => miss_indices.push(i),
                }
            }
        } else {
            miss_indices = (0..texts.len()).collect();
        }
        if !miss_indices.is_empty() {
            let miss_texts: Vec<&str> = miss_indices.iter().map(|&i| texts[i].as_ref()).collect();
            let vectors = self.provider.embed_many(&miss_texts).map_err(|e| match e {
                Error::BatchItem { index, source } => Error::BatchItem {
                    index: miss_indices[index],
                    source,
                },
                other => other,
            })?;
            if vectors.len() != miss_texts.len() {
                return Err(Error::Backend(format!(
                    "provider returned {} vectors for {} inputs",
                    vectors.len(),
                    miss_texts.len()
                )));
            }
            for (slot, vector) in miss_indices.iter().zip(vectors) {
                if let Some(cache) = &self.cache {
                    cache.put(&self.cache_key(texts[*slot].as_ref()), &vector)?;
                }
                out[*slot] = Some(vector);
            }
        }
        Ok(out.into_iter().map(|v| v.expect("all slots filled")).collect())
    }
}

/// Cache-only provider: serves precomputed vectors and fails on misses.
/// Useful for replaying runs embedded with an external encoder.
pub struct CacheOnlyEmbedder {
    cache: Arc<EmbeddingCache>,
    model_id: String,
    dimension: usize,
}

impl CacheOnlyEmbedder {
    pub fn new(cache: Arc<EmbeddingCache>, model_id: impl Into<String>, dimension: usize) -> Self {
        Self {
            cache,
            model_id: model_id.into(),
            dimension,
        }
    }
}

impl TextEmbedder for CacheOnlyEmbedder {
    fn kind(&self) -> ProviderKind {
        ProviderKind::FileCache
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_text(&self, text: &str) -> Result<EmbeddingVector> {
        let key = EmbeddingCache::key(self.kind(), &self.model_id, self.dimension, text);
        self.cache
            .get(&key)?
            .ok_or_else(|| Error::CacheMiss(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn identical_vectors_have_similarity_one() {
        let v = vec_of(&[0.3, -0.4, 1.2]);
        assert_eq!(cosine_similarity(&v, &v).unwrap(), 1.0);
    }

    #[test]
    fn orthogonal_and_antipodal() {
        let x = vec_of(&[1.0, 0.0]);
        let y = vec_of(&[0.0, 1.0]);
        let neg_x = vec_of(&[-1.0, 0.0]);
        assert_eq!(cosine_similarity(&x, &y).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&x, &neg_x).unwrap(), -1.0);
    }

    #[test]
    fn dimension_mismatch_and_zero_norm_error() {
        let x = vec_of(&[1.0, 0.0]);
        let y = vec_of(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            cosine_similarity(&x, &y),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
        let z = vec_of(&[0.0, 0.0]);
        assert!(matches!(cosine_similarity(&x, &z), Err(Error::ZeroNormVector)));
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(EmbeddingVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmbeddingVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn symmetry_and_scale_invariance() {
        let a = vec_of(&[0.2, 0.5, -0.7, 1.1]);
        let b = vec_of(&[-0.9, 0.1, 0.4, 0.3]);
        assert_eq!(
            cosine_similarity(&a, &b).unwrap(),
            cosine_similarity(&b, &a).unwrap()
        );
        let scaled = vec_of(&a.values().iter().map(|v| v * 37.5).collect::<Vec<_>>());
        let diff =
            (cosine_similarity(&a, &b).unwrap() - cosine_similarity(&scaled, &b).unwrap()).abs();
        assert!(diff < 1e-12);
    }

    #[test]
    fn empty_text_rejected_with_index_in_batches() {
        let service = EmbeddingService::hashing(16);
        assert!(matches!(service.embed("   "), Err(Error::EmptyText)));
        let err = service.embed_batch(&["fine", " ", "also fine"]).unwrap_err();
        assert!(matches!(err, Error::BatchItem { index: 1, .. }));
    }

    #[test]
    fn batch_preserves_order() {
        let service = EmbeddingService::hashing(32);
        let texts = ["alpha beta", "gamma", "delta epsilon zeta"];
        let batch = service.embed_batch(&texts).unwrap();
        for (text, vector) in texts.iter().zip(&batch) {
            assert_eq!(vector, &service.embed(text).unwrap());
        }
    }
}
