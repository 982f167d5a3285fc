//! Async HTTP clients for the external encoder and decoder.
//!
//! Wire format: `POST {base}/v1/encode` with
//! `{"modality", "payload" (base64), "payload_kind"}` answers
//! `{"modality", "embedding"}`; `POST {base}/v1/decode` with
//! `{"bundle", "width", "height", "steps", "seed"}` answers PNG bytes.

use std::time::Duration;

use base64::Engine;
use imgany_core::{canonical, Bundle, Feature, ModalityFeature, ModalityTag};
use serde::{Deserialize, Serialize};

use crate::error::{BackendError, Result};

pub const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

pub fn is_png(bytes: &[u8]) -> bool {
    bytes.starts_with(&PNG_SIGNATURE)
}

/// Retries for idempotent calls: up to `max_retries` extra attempts, waiting
/// `base_delay * 2^n` before attempt `n + 1`.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_retries: 2, base_delay: Duration::from_millis(100) }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self { max_retries: 0, base_delay: Duration::ZERO }
    }

    fn delay(&self, attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1u32 << attempt.min(16))
    }

    async fn run<F, Fut, R>(&self, mut call: F) -> Result<R>
    where
        F: FnMut() -> Fut,
        Fut: std::future::Future<Output = Result<R>>,
    {
        let mut attempt = 0;
        loop {
            match call().await {
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    tracing::debug!(attempt, error = %e, "retrying");
                    tokio::time::sleep(self.delay(attempt)).await;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeRequest {
    pub modality: ModalityTag,
    pub payload: Vec<u8>,
    /// Media-type hint, e.g. `text/plain` or `audio/wav`.
    pub payload_kind: String,
}

impl EncodeRequest {
    pub fn new(modality: ModalityTag, payload: impl Into<Vec<u8>>, payload_kind: impl Into<String>) -> Result<Self> {
        let payload = payload.into();
        if payload.is_empty() {
            return Err(BackendError::InvalidRequest("payload is empty".into()));
        }
        Ok(Self { modality, payload, payload_kind: payload_kind.into() })
    }

    pub fn text(modality: ModalityTag, text: &str) -> Result<Self> {
        Self::new(modality, text.as_bytes(), "text/plain")
    }
}

#[derive(Serialize)]
struct EncodeWire<'a> {
    modality: ModalityTag,
    payload: String,
    payload_kind: &'a str,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodeResponse {
    pub modality: ModalityTag,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeRequest {
    pub bundle: Bundle,
    pub width: u32,
    pub height: u32,
    pub steps: u32,
    pub seed: u64,
}

impl DecodeRequest {
    pub fn new(bundle: Bundle, width: u32, height: u32, steps: u32, seed: u64) -> Result<Self> {
        if width == 0 || height == 0 || width % 8 != 0 || height % 8 != 0 {
            return Err(BackendError::InvalidRequest(format!(
                "image size must be positive multiples of 8, got {width}x{height}"
            )));
        }
        if steps == 0 {
            return Err(BackendError::InvalidRequest("steps must be at least 1".into()));
        }
        Ok(Self { bundle, width, height, steps, seed })
    }
}

#[derive(Serialize)]
struct DecodeWire<'a> {
    bundle: &'a Bundle,
    width: u32,
    height: u32,
    steps: u32,
    seed: u64,
}

fn join(base: &str, path: &str) -> String {
    format!("{}{}", base.trim_end_matches('/'), path)
}

fn http_client(timeout: Duration) -> Result<reqwest::Client> {
    reqwest::Client::builder().timeout(timeout).build().map_err(|e| BackendError::Transport(e.to_string()))
}

async fn post(http: &reqwest::Client, url: &str, body: Vec<u8>) -> Result<Vec<u8>> {
    let resp = http
        .post(url)
        .header(reqwest::header::CONTENT_TYPE, "application/json")
        .body(body)
        .send()
        .await
        .map_err(|e| BackendError::Transport(e.to_string()))?;
    let status = resp.status();
    if !status.is_success() {
        return Err(BackendError::BadStatus(status.as_u16()));
    }
    let bytes = resp.bytes().await.map_err(|e| BackendError::Transport(e.to_string()))?;
    Ok(bytes.to_vec())
}

/// Client for a remote encoder. Cheap to clone and safe to share.
#[derive(Debug, Clone)]
pub struct EncoderClient {
    http: reqwest::Client,
    base: String,
    dim: usize,
    retry: RetryPolicy,
}

impl EncoderClient {
    /// `dim` is the bank dimension every response must match.
    pub fn new(base: impl Into<String>, dim: usize) -> Result<Self> {
        Ok(Self { http: http_client(Duration::from_secs(60))?, base: base.into(), dim, retry: RetryPolicy::default() })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub async fn encode(&self, req: &EncodeRequest) -> Result<Feature> {
        let body = serde_json::to_vec(&EncodeWire {
            modality: req.modality,
            payload: base64::engine::general_purpose::STANDARD.encode(&req.payload),
            payload_kind: &req.payload_kind,
        })
        .map_err(|e| BackendError::InvalidRequest(e.to_string()))?;
        let url = join(&self.base, "/v1/encode");
        let bytes = self.retry.run(|| post(&self.http, &url, body.clone())).await?;
        let resp: EncodeResponse =
            serde_json::from_slice(&bytes).map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
        self.admit(req.modality, resp)
    }

    /// The ingest gate applied to every remote embedding.
    fn admit(&self, expected: ModalityTag, resp: EncodeResponse) -> Result<Feature> {
        if resp.modality != expected {
            return Err(BackendError::ModalityMismatch { expected, found: resp.modality });
        }
        if resp.embedding.iter().any(|x| !x.is_finite()) {
            return Err(BackendError::NonFinite);
        }
        if resp.embedding.len() != self.dim {
            return Err(BackendError::DimMismatch { expected: self.dim, found: resp.embedding.len() });
        }
        Ok(ModalityFeature::new(expected, resp.embedding)?)
    }
}

/// Client for a remote diffusion decoder.
#[derive(Debug, Clone)]
pub struct DecoderClient {
    http: reqwest::Client,
    base: String,
    retry: RetryPolicy,
}

impl DecoderClient {
    pub fn new(base: impl Into<String>) -> Result<Self> {
        Ok(Self { http: http_client(Duration::from_secs(600))?, base: base.into(), retry: RetryPolicy::default() })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Returns the PNG bytes. Only the signature is checked.
    pub async fn decode(&self, req: &DecodeRequest) -> Result<Vec<u8>> {
        let body = canonical::to_vec(&DecodeWire {
            bundle: &req.bundle,
            width: req.width,
            height: req.height,
            steps: req.steps,
            seed: req.seed,
        })
        .map_err(|e| BackendError::InvalidRequest(e.to_string()))?;
        let url = join(&self.base, "/v1/decode");
        let bytes = self.retry.run(|| post(&self.http, &url, body.clone())).await?;
        if !is_png(&bytes) {
            return Err(BackendError::NotPng);
        }
        Ok(bytes)
    }
}
