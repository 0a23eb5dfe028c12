//! Remote embeddings over a generic embeddings-HTTP endpoint.
//!
//! Request body: `{"model": <model_id>, "input": [<texts>]}`.
//! Response body: `{"data": [{"embedding": [f64; dimension]}, ...]}` with one
//! vector per input, in input order.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::embedding::{EmbeddingVector, ProviderKind, TextEmbedder};
use crate::error::{Error, Result};
use crate::util::{RetryPolicy, Semaphore};

pub struct RemoteEmbedder {
    endpoint: String,
    model_id: String,
    dimension: usize,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
    limiter: Semaphore,
}

#[derive(Deserialize)]
struct EmbeddingsResponse {
    data: Vec<EmbeddingItem>,
}

#[derive(Deserialize)]
struct EmbeddingItem {
    embedding: Vec<f64>,
}

impl RemoteEmbedder {
    pub fn new(
        endpoint: impl Into<String>,
        model_id: impl Into<String>,
        dimension: usize,
        api_key: Option<String>,
    ) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| Error::Backend(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.into(),
            model_id: model_id.into(),
            dimension,
            api_key,
            client,
            retry: RetryPolicy::default(),
            limiter: Semaphore::new(4),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_inflight(mut self, max_inflight: usize) -> Self {
        self.limiter = Semaphore::new(max_inflight);
        self
    }

    fn post_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        let body = json!({ "model": self.model_id, "input": texts });
        let mut last_error = String::new();
        for attempt in 1..=self.retry.max_attempts {
            let wait = self.retry.backoff_before(attempt);
            if !wait.is_zero() {
                std::thread::sleep(wait);
            }
            let _permit = self.limiter.acquire();
            let mut request = self.client.post(&self.endpoint).json(&body);
            if let Some(key) = &self.api_key {
                request = request.bearer_auth(key);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status();
                    if status.as_u16() == 401 || status.as_u16() == 403 {
                        return Err(Error::BackendAuth(format!("embedding endpoint: {status}")));
                    }
                    if status.is_server_error() || status.as_u16() == 429 {
                        last_error = format!("status {status}");
                        continue;
                    }
                    if !status.is_success() {
                        return Err(Error::Backend(format!("embedding endpoint: {status}")));
                    }
                    let parsed: EmbeddingsResponse = response
                        .json()
                        .map_err(|e| Error::Backend(format!("bad embeddings payload: {e}")))?;
                    return self.validate(texts.len(), parsed);
                }
                Err(e) => {
                    last_error = e.to_string();
                }
            }
        }
        Err(Error::BackendExhausted {
            attempts: self.retry.max_attempts,
            message: last_error,
        })
    }

    fn validate(&self, expected: usize, parsed: EmbeddingsResponse) -> Result<Vec<EmbeddingVector>> {
        if parsed.data.len() != expected {
            return Err(Error::Backend(format!(
                "embedding endpoint returned {} vectors for {} inputs",
                parsed.data.len(),
                expected
            )));
        }
        parsed
            .data
            .into_iter()
            .map(|item| {
                if item.embedding.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        left: item.embedding.len(),
                        right: self.dimension,
                    });
                }
                EmbeddingVector::new(item.embedding)
            })
            .collect()
    }
}

impl TextEmbedder for RemoteEmbedder {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Remote
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_text(&self, text: &str) -> Result<EmbeddingVector> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        Ok(self.post_batch(&[text])?.remove(0))
    }

    fn embed_many(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        const CHUNK: usize = 64;
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(CHUNK) {
            out.extend(self.post_batch(chunk)?);
        }
        Ok(out)
    }
}
