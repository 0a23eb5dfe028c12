//! Content-addressed embedding cache: one JSON file per vector under
//! `<root>/<provider>/<hash>`, fronted by an in-memory map. Readers never
//! lock; writes go through a temp-file rename so a concurrent reader sees
//! either nothing or a complete vector.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use crate::embedding::{EmbeddingVector, ProviderKind};
use crate::error::{Error, Result};
use crate::util::{atomic_write, sha256_hex};

pub struct EmbeddingCache {
    root: PathBuf,
    memory: RwLock<HashMap<String, EmbeddingVector>>,
}

impl EmbeddingCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            memory: RwLock::new(HashMap::new()),
        }
    }

    /// Cache key: provider kind, model id, dimension, and content hash.
    pub fn key(kind: ProviderKind, model_id: &str, dimension: usize, text: &str) -> String {
        let material = format!("{}|{}|{}|{}", kind.as_str(), model_id, dimension, text);
        format!(
            "{}-{}-{}/{}",
            kind.as_str(),
            sanitize(model_id),
            dimension,
            sha256_hex(material.as_bytes())
        )
    }

    fn path_for(&self, key: &str) -> PathBuf {
        let mut path = self.root.clone();
        for part in key.split('/') {
            path.push(part);
        }
        path.set_extension("json");
        path
    }

    pub fn get(&self, key: &str) -> Result<Option<EmbeddingVector>> {
        if let Some(hit) = self.memory.read().expect("cache lock").get(key) {
            return Ok(Some(hit.clone()));
        }
        let path = self.path_for(key);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path).map_err(Error::io_at(&path))?;
        let vector: EmbeddingVector = serde_json::from_slice(&bytes)?;
        self.memory
            .write()
            .expect("cache lock")
            .insert(key.to_string(), vector.clone());
        Ok(Some(vector))
    }

    pub fn put(&self, key: &str, vector: &EmbeddingVector) -> Result<()> {
        self.memory
            .write()
            .expect("cache lock")
            .insert(key.to_string(), vector.clone());
        let path = self.path_for(key);
        // serde_json round-trips f64 exactly, so a cached read is bitwise
        // identical to the freshly computed vector.
        atomic_write(&path, &serde_json::to_vec(vector)?)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

fn sanitize(model_id: &str) -> String {
    model_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}
