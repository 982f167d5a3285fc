//! Entity and attribute fusion branches, the variance-gated combiner, and
//! the end-to-end pipeline producing a [`ConditionBundle`].
//!
//! Every reduction over modalities runs in canonical [`ModalityTag`] order,
//! so results are bit-identical under any permutation of the input list.

mod attribute;
mod combine;
mod entity;

use std::collections::HashSet;

use serde::Serialize;

pub use attribute::{attribute_retrieve, attribute_weights, AttributeBranchResult, AttributeRetrieval};
pub use combine::{threshold_fuse, Combined};
pub use entity::{entity_retrieve, entity_weights, EntityBranchResult, EntityRetrieval};

use crate::bank::{apply_adjective_filter, EmbeddingBank, EmbeddingSource, LexiconKind};
use crate::bundle::{ConditionBundle, FusionWeights};
use crate::config::FusionConfig;
use crate::error::{AtStage, Error, PipelineError, Result, Stage};
use crate::feature::{canonical_order, validate_feature_set, ModalityFeature, ModalityTag};
use crate::scalar::Scalar;
use crate::vector::{check_dim, normalize_wide, EmbeddingVector};

/// Separator between words in `c2` and `c3`.
pub const WORD_JOINER: &str = ", ";

/// A retrieved lexicon word and its (unit) bank embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct WordEmbedding<T: Scalar> {
    pub word: String,
    pub embedding: EmbeddingVector<T>,
}

impl<T: Scalar> WordEmbedding<T> {
    /// Reads row `i` of `source`, re-normalized at `T` precision.
    pub(crate) fn from_source<S: EmbeddingSource + ?Sized>(source: &S, i: usize) -> Result<Self> {
        let wide: Vec<f64> = source.row(i).iter().map(|&x| x as f64).collect();
        Ok(Self { word: source.word(i).to_owned(), embedding: normalize_wide(&wide)? })
    }
}

/// Joins words with [`WORD_JOINER`], dropping repeats after the first.
pub fn join_words<'a>(words: impl IntoIterator<Item = &'a str>) -> String {
    let mut seen = HashSet::new();
    words.into_iter().filter(|w| seen.insert(*w)).collect::<Vec<_>>().join(WORD_JOINER)
}

/// `Σ_m w_m · f_m` over the normalized weights, re-normalized to unit length.
///
/// A modality holding the whole weight is returned unchanged.
pub fn weighted_fuse<T: Scalar>(
    features: &[ModalityFeature<T>],
    weights: &FusionWeights<T>,
) -> Result<EmbeddingVector<T>> {
    let ordered = canonical_order(features);
    let tags: Vec<ModalityTag> = ordered.iter().map(|f| f.tag()).collect();
    if tags.len() != weights.normalized.len() || !tags.iter().eq(weights.normalized.keys()) {
        return Err(Error::TagMismatch);
    }
    let first = ordered.first().ok_or(Error::EmptyInput)?;
    let dim = first.dim();
    for f in &ordered {
        check_dim(dim, f.dim())?;
    }
    if let Some(f) = ordered.iter().find(|f| weights.normalized[&f.tag()] == T::one()) {
        return Ok(f.embedding().clone());
    }
    let mut acc = vec![0.0f64; dim];
    for f in &ordered {
        let w = weights.normalized[&f.tag()].widen();
        for (a, x) in acc.iter_mut().zip(f.embedding().as_slice()) {
            *a += w * x.widen();
        }
    }
    normalize_wide(&acc)
}

/// Everything a pipeline run computed, not just the bundle.
#[derive(Debug, Clone)]
pub struct PipelineOutput<T: Scalar> {
    pub bundle: ConditionBundle<T>,
    pub entity: Option<EntityBranchResult<T>>,
    pub attribute: Option<AttributeBranchResult<T>>,
}

/// Builds the bundle from whichever branch results are present.
pub fn assemble_conditions<T: Scalar>(
    entity: Option<&EntityBranchResult<T>>,
    attribute: Option<&AttributeBranchResult<T>>,
    combined: Combined<T>,
    config: &FusionConfig,
) -> Result<ConditionBundle<T>> {
    if entity.is_none() && attribute.is_none() {
        return Err(Error::NoBranches);
    }
    Ok(ConditionBundle {
        c1: combined.c1,
        c2: entity.map(|e| e.c2.clone()).unwrap_or_default(),
        c3: attribute.map(|a| a.c3.clone()).unwrap_or_default(),
        entity_weights: entity.map(|e| e.weights.clone()),
        attribute_weights: attribute.map(|a| a.weights.clone()),
        variance: combined.variance,
        alpha: combined.alpha,
        config_echo: config.clone(),
    })
}

fn check_bank(bank: &EmbeddingBank, kind: LexiconKind, dim: usize) -> Result<()> {
    if bank.kind() != kind {
        return Err(Error::WrongKind { expected: kind, found: bank.kind() });
    }
    check_dim(bank.dim(), dim)
}

/// Runs both branches (as enabled), the combiner, and assembly.
pub fn run_pipeline<T: Scalar>(
    features: &[ModalityFeature<T>],
    nouns: &EmbeddingBank,
    adjectives: &EmbeddingBank,
    config: &FusionConfig,
) -> Result<ConditionBundle<T>, PipelineError> {
    run_pipeline_detailed(features, nouns, adjectives, config).map(|out| out.bundle)
}

pub fn run_pipeline_detailed<T: Scalar>(
    features: &[ModalityFeature<T>],
    nouns: &EmbeddingBank,
    adjectives: &EmbeddingBank,
    config: &FusionConfig,
) -> Result<PipelineOutput<T>, PipelineError> {
    config.validate().at(Stage::Validate)?;
    let dim = validate_feature_set(features).at(Stage::Validate)?;
    check_bank(nouns, LexiconKind::Noun, dim).at(Stage::Validate)?;
    check_bank(adjectives, LexiconKind::Adjective, dim).at(Stage::Validate)?;

    let mut features = features.to_vec();
    features.sort_by_key(|f| f.tag());

    let entity = if config.enable_entity_branch {
        let retrieval = entity_retrieve(&features, nouns, config.k_entity).at(Stage::EntityRetrieval)?;
        let weights = entity_weights(&features, &retrieval.entity_features).at(Stage::EntityWeights)?;
        let fused = weighted_fuse(&features, &weights).at(Stage::EntityFusion)?;
        Some(EntityBranchResult::new(retrieval, weights, fused))
    } else {
        None
    };

    let attribute = if config.enable_attribute_branch {
        let view = apply_adjective_filter(adjectives, config.enable_adjective_filter).at(Stage::AttributeRetrieval)?;
        let retrieval = attribute_retrieve(&features, &view, config.k_attribute).at(Stage::AttributeRetrieval)?;
        let weights = attribute_weights(&features, &retrieval.attribute_features).at(Stage::AttributeWeights)?;
        let fused = weighted_fuse(&features, &weights).at(Stage::AttributeFusion)?;
        Some(AttributeBranchResult::new(retrieval, weights, fused))
    } else {
        None
    };

    let combined =
        threshold_fuse(entity.as_ref().map(|e| &e.fused), attribute.as_ref().map(|a| &a.fused), &features, config)
            .at(Stage::Combine)?;
    let bundle = assemble_conditions(entity.as_ref(), attribute.as_ref(), combined, config).at(Stage::Assemble)?;
    Ok(PipelineOutput { bundle, entity, attribute })
}
