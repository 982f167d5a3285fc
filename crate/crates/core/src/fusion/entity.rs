//! Entity branch: per-modality noun retrieval, similarity-based weights.

use std::collections::{BTreeMap, HashSet};

use crate::bank::EmbeddingSource;
use crate::bundle::{FusionWeights, WeightKind};
use crate::error::{Error, Result};
use crate::feature::{canonical_order, ModalityFeature, ModalityTag};
use crate::fusion::{join_words, WordEmbedding};
use crate::retrieval::batch_retrieve;
use crate::scalar::{dot_wide, Scalar};
use crate::vector::{check_dim, EmbeddingVector};

#[derive(Debug, Clone, PartialEq)]
pub struct EntityRetrieval<T: Scalar> {
    /// Top nouns for each modality, best first.
    pub words_per_modality: BTreeMap<ModalityTag, Vec<String>>,
    /// Union of all retrieved nouns, first occurrence in canonical modality
    /// order.
    pub entity_features: Vec<WordEmbedding<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityBranchResult<T: Scalar> {
    pub words_per_modality: BTreeMap<ModalityTag, Vec<String>>,
    pub entity_features: Vec<WordEmbedding<T>>,
    pub weights: FusionWeights<T>,
    pub fused: EmbeddingVector<T>,
    pub c2: String,
}

impl<T: Scalar> EntityBranchResult<T> {
    pub fn new(retrieval: EntityRetrieval<T>, weights: FusionWeights<T>, fused: EmbeddingVector<T>) -> Self {
        let c2 = join_words(retrieval.entity_features.iter().map(|e| e.word.as_str()));
        Self {
            words_per_modality: retrieval.words_per_modality,
            entity_features: retrieval.entity_features,
            weights,
            fused,
            c2,
        }
    }
}

/// Retrieves the `k` most similar nouns for every modality feature.
pub fn entity_retrieve<T, S>(features: &[ModalityFeature<T>], nouns: &S, k: usize) -> Result<EntityRetrieval<T>>
where
    T: Scalar,
    S: EmbeddingSource + Sync + ?Sized,
{
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    if nouns.is_empty() {
        return Err(Error::EmptyBank);
    }
    let ordered = canonical_order(features);
    let queries: Vec<EmbeddingVector<T>> = ordered.iter().map(|f| f.embedding().clone()).collect();
    let hits = batch_retrieve(nouns, &queries, k)?;

    let mut words_per_modality = BTreeMap::new();
    let mut entity_features = Vec::new();
    let mut seen = HashSet::new();
    for (f, hits) in ordered.iter().zip(hits) {
        for h in &hits {
            if seen.insert(h.word.clone()) {
                entity_features.push(WordEmbedding::from_source(nouns, h.bank_index)?);
            }
        }
        words_per_modality.insert(f.tag(), hits.into_iter().map(|h| h.word).collect());
    }
    Ok(EntityRetrieval { words_per_modality, entity_features })
}

/// `w_m = (Σ_e f_m · e) / n` over the `n` entity embeddings.
pub fn entity_weights<T: Scalar>(
    features: &[ModalityFeature<T>],
    entity_features: &[WordEmbedding<T>],
) -> Result<FusionWeights<T>> {
    if entity_features.is_empty() {
        return Err(Error::EmptyEntitySet);
    }
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = entity_features.len() as f64;
    let mut raw = BTreeMap::new();
    for f in canonical_order(features) {
        let mut sum = 0.0f64;
        for e in entity_features {
            check_dim(f.dim(), e.embedding.dim())?;
            sum += dot_wide(f.embedding().as_slice(), e.embedding.as_slice());
        }
        raw.insert(f.tag(), (sum / n).clamp(-1.0, 1.0));
    }
    FusionWeights::from_raw(WeightKind::Entity, raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{build_bank, EmbeddingBank, LexiconEntry, LexiconKind};
    use ModalityTag::*;

    fn feat(tag: ModalityTag, xs: &[f64]) -> ModalityFeature<f64> {
        ModalityFeature::new(tag, xs.to_vec()).unwrap()
    }

    fn we(word: &str, xs: &[f64]) -> WordEmbedding<f64> {
        WordEmbedding { word: word.into(), embedding: EmbeddingVector::new(xs.to_vec()).unwrap() }
    }

    fn nouns() -> EmbeddingBank {
        let e = |w: &str, v: &[f64]| LexiconEntry::new(w, LexiconKind::Noun, true, v.to_vec()).unwrap();
        build_bank(
            vec![
                e("cat", &[1.0, 0.0, 0.0, 0.0]),
                e("room", &[0.8, 0.6, 0.0, 0.0]),
                e("bed", &[0.0, 0.8, 0.6, 0.0]),
                e("tree", &[0.0, 0.0, 0.0, 1.0]),
            ],
            LexiconKind::Noun,
        )
        .unwrap()
    }

    #[test]
    fn planted_match() {
        let bank = nouns();
        let f = [feat(Image, &[1.0, 0.0, 0.0, 0.0])];
        let r = entity_retrieve(&f, &bank, 1).unwrap();
        assert_eq!(r.words_per_modality[&Image], ["cat"]);
        assert_eq!(r.entity_features.len(), 1);
        assert_eq!(r.entity_features[0].word, "cat");
        assert_eq!(r.entity_features[0].embedding.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn overlapping_sets_dedup_in_canonical_order() {
        let bank = nouns();
        // Text retrieves [cat, room]; Audio retrieves [bed, room].
        let f = [feat(Audio, &[0.1, 0.7, 0.5, 0.0]), feat(Text, &[0.95, 0.3, 0.0, 0.0])];
        let r = entity_retrieve(&f, &bank, 2).unwrap();
        assert_eq!(r.words_per_modality[&Text], ["cat", "room"]);
        assert_eq!(r.words_per_modality[&Audio], ["bed", "room"]);
        let words: Vec<_> = r.entity_features.iter().map(|e| e.word.as_str()).collect();
        assert_eq!(words, ["cat", "room", "bed"]);
    }

    #[test]
    fn symmetric_features_equal_weights() {
        let u = [0.6, 0.8];
        let w = entity_weights(&[feat(Text, &u), feat(Audio, &u)], &[we("a", &[1.0, 0.0])]).unwrap();
        assert_eq!(w.raw[&Text], w.raw[&Audio]);
        assert_eq!(w.normalized[&Text], 0.5);
    }

    #[test]
    fn hand_evaluated_weights() {
        let f = [feat(Text, &[1.0, 0.0]), feat(Audio, &[0.0, 1.0])];
        let w = entity_weights(&f, &[we("a", &[1.0, 0.0]), we("b", &[0.0, 1.0])]).unwrap();
        assert_eq!((w.raw[&Text], w.raw[&Audio]), (0.5, 0.5));
        assert_eq!((w.normalized[&Text], w.normalized[&Audio]), (0.5, 0.5));

        let w = entity_weights(&f, &[we("a", &[1.0, 0.0])]).unwrap();
        assert_eq!((w.raw[&Text], w.raw[&Audio]), (1.0, 0.0));
        assert_eq!((w.normalized[&Text], w.normalized[&Audio]), (1.0, 0.0));
    }

    #[test]
    fn empty_entity_set() {
        assert!(matches!(entity_weights(&[feat(Text, &[1.0])], &[]), Err(Error::EmptyEntitySet)));
    }
}
