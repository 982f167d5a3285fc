//! Request and response bodies.

use imgany_core::{
    run_pipeline, Bundle, EmbeddingBank, Error, Feature, FusionConfig, FusionConfigOverrides, LexiconKind, ModalityTag,
    PipelineError, Stage,
};
use serde::{Deserialize, Serialize};

/// One input feature as it appears on the wire and in feature files.
/// `dim`, when present, must equal the embedding length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireFeature {
    pub modality: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub embedding: Vec<f64>,
}

impl WireFeature {
    pub fn new(tag: ModalityTag, embedding: Vec<f64>) -> Self {
        Self { modality: tag.name().to_string(), dim: None, embedding }
    }

    /// Parses the tag and normalizes the embedding.
    pub fn into_feature(self) -> Result<Feature, Error> {
        let tag: ModalityTag = self.modality.parse()?;
        if let Some(dim) = self.dim {
            if dim != self.embedding.len() {
                return Err(Error::DimMismatch { expected: dim, found: self.embedding.len() });
            }
        }
        Feature::new(tag, self.embedding)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuseRequest {
    pub features: Vec<WireFeature>,
    #[serde(default)]
    pub config: Option<FusionConfigOverrides>,
}

/// The fusion entry point shared by the service and the CLI, so both produce
/// the same bundle from the same inputs.
pub fn fuse_bundle(
    features: Vec<WireFeature>,
    nouns: &EmbeddingBank,
    adjectives: &EmbeddingBank,
    config: &FusionConfig,
) -> Result<Bundle, PipelineError> {
    let features = features
        .into_iter()
        .map(WireFeature::into_feature)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PipelineError::new(Stage::Validate, e))?;
    run_pipeline(&features, nouns, adjectives, config)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub stage: String,
    pub message: String,
}

impl ErrorBody {
    pub fn new(code: impl Into<String>, stage: impl Into<String>, message: impl Into<String>) -> Self {
        Self { code: code.into(), stage: stage.into(), message: message.into() }
    }
}

impl From<&PipelineError> for ErrorBody {
    fn from(e: &PipelineError) -> Self {
        Self::new(e.code(), e.stage.as_str(), e.source.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankInfo {
    pub kind: LexiconKind,
    pub dim: usize,
    pub count: usize,
    /// Entries visible to retrieval under the service's default config.
    pub filtered_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BanksResponse {
    pub nouns: BankInfo,
    pub adjectives: BankInfo,
}
