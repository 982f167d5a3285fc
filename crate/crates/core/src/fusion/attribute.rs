//! Attribute branch: one shared adjective set retrieved from the mean
//! feature, distance-based weights.

use std::collections::BTreeMap;

use crate::bank::EmbeddingSource;
use crate::bundle::{FusionWeights, WeightKind};
use crate::error::{Error, Result};
use crate::feature::{canonical_order, mean_feature, ModalityFeature};
use crate::fusion::{join_words, WordEmbedding};
use crate::retrieval::retrieve_top_k;
use crate::scalar::Scalar;
use crate::vector::{check_dim, EmbeddingVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRetrieval<T: Scalar> {
    /// Retrieved adjectives, best first.
    pub words: Vec<String>,
    pub attribute_features: Vec<WordEmbedding<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeBranchResult<T: Scalar> {
    pub words: Vec<String>,
    pub attribute_features: Vec<WordEmbedding<T>>,
    pub weights: FusionWeights<T>,
    pub fused: EmbeddingVector<T>,
    pub c3: String,
}

impl<T: Scalar> AttributeBranchResult<T> {
    pub fn new(retrieval: AttributeRetrieval<T>, weights: FusionWeights<T>, fused: EmbeddingVector<T>) -> Self {
        let c3 = join_words(retrieval.words.iter().map(String::as_str));
        Self { words: retrieval.words, attribute_features: retrieval.attribute_features, weights, fused, c3 }
    }
}

/// Retrieves the `k` adjectives closest to the mean of all features.
pub fn attribute_retrieve<T, S>(
    features: &[ModalityFeature<T>],
    adjectives: &S,
    k: usize,
) -> Result<AttributeRetrieval<T>>
where
    T: Scalar,
    S: EmbeddingSource + Sync + ?Sized,
{
    let mean = mean_feature(features)?;
    let hits = retrieve_top_k(adjectives, &mean, k)?;
    let attribute_features =
        hits.iter().map(|h| WordEmbedding::from_source(adjectives, h.bank_index)).collect::<Result<Vec<_>>>()?;
    Ok(AttributeRetrieval { words: hits.into_iter().map(|h| h.word).collect(), attribute_features })
}

/// `w_m = ‖f_m − ā‖²` where `ā` is the mean attribute embedding.
pub fn attribute_weights<T: Scalar>(
    features: &[ModalityFeature<T>],
    attribute_features: &[WordEmbedding<T>],
) -> Result<FusionWeights<T>> {
    let first = attribute_features.first().ok_or(Error::EmptyAttributeSet)?;
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = first.embedding.dim();
    let mut centroid = vec![0.0f64; dim];
    for a in attribute_features {
        check_dim(dim, a.embedding.dim())?;
        for (c, x) in centroid.iter_mut().zip(a.embedding.as_slice()) {
            *c += x.widen();
        }
    }
    let n = attribute_features.len() as f64;
    centroid.iter_mut().for_each(|c| *c /= n);

    let mut raw = BTreeMap::new();
    for f in canonical_order(features) {
        check_dim(dim, f.dim())?;
        let dist_sq: f64 = f
            .embedding()
            .as_slice()
            .iter()
            .zip(&centroid)
            .map(|(x, c)| {
                let d = x.widen() - c;
                d * d
            })
            .sum();
        raw.insert(f.tag(), dist_sq.clamp(0.0, 4.0));
    }
    FusionWeights::from_raw(WeightKind::Attribute, raw)
}
