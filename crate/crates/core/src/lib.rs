//! Training-free multi-modal conditioning fusion.
//!
//! Per-modality embeddings are grounded against two lexicon banks (entity
//! nouns and concrete attribute adjectives) by exact cosine retrieval. The
//! retrieved words weight two fusions of the inputs, which a variance-gated
//! combiner mixes into one conditioning vector. The result is a
//! [`ConditionBundle`]: fused embedding `c1`, entity words `c2`, and
//! attribute words `c3`.
//!
//! Numerics are generic over [`Scalar`] (`f32`/`f64`); the aliases below fix
//! the `f64` instantiation used by the service and CLI.

pub mod bank;
pub mod bundle;
pub mod canonical;
pub mod config;
pub mod error;
pub mod feature;
pub mod fusion;
pub mod retrieval;
pub mod scalar;
pub mod vector;

pub use bank::{
    apply_adjective_filter, build_bank, import_jsonl, load_bank, save_bank, BankHeader, BankView, EmbeddingBank,
    EmbeddingSource, LexiconEntry, LexiconKind,
};
pub use bundle::{ConditionBundle, FusionWeights, WeightKind};
pub use config::{FusionConfig, FusionConfigOverrides};
pub use error::{Error, PipelineError, Result, Stage};
pub use feature::{mean_feature, total_variance, validate_feature_set, ModalityFeature, ModalityTag};
pub use fusion::{
    assemble_conditions, attribute_retrieve, attribute_weights, entity_retrieve, entity_weights, run_pipeline,
    run_pipeline_detailed, threshold_fuse, weighted_fuse, AttributeBranchResult, Combined, EntityBranchResult,
    PipelineOutput, WordEmbedding,
};
pub use retrieval::{batch_retrieve, retrieve_top_k, retrieve_top_k_oracle, RetrievalHit};
pub use scalar::Scalar;
pub use vector::{normalize, EmbeddingVector};

pub type Embedding = EmbeddingVector<f64>;
pub type Feature = ModalityFeature<f64>;
pub type Weights = FusionWeights<f64>;
pub type Bundle = ConditionBundle<f64>;

pub type Embedding32 = EmbeddingVector<f32>;
pub type Feature32 = ModalityFeature<f32>;
pub type Bundle32 = ConditionBundle<f32>;
