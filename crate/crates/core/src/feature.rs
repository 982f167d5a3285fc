//! Modality tags, per-modality features, and statistics over a feature set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::{check_dim, normalize_slice, EmbeddingVector, UNIT_TOLERANCE};

/// The closed set of input modalities. Declaration order is the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModalityTag {
    Text,
    Audio,
    Image,
    PointCloud,
    Thermal,
    Depth,
    Event,
}

impl ModalityTag {
    pub const ALL: [ModalityTag; 7] = [
        ModalityTag::Text,
        ModalityTag::Audio,
        ModalityTag::Image,
        ModalityTag::PointCloud,
        ModalityTag::Thermal,
        ModalityTag::Depth,
        ModalityTag::Event,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModalityTag::Text => "Text",
            ModalityTag::Audio => "Audio",
            ModalityTag::Image => "Image",
            ModalityTag::PointCloud => "PointCloud",
            ModalityTag::Thermal => "Thermal",
            ModalityTag::Depth => "Depth",
            ModalityTag::Event => "Event",
        }
    }
}

impl fmt::Display for ModalityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModalityTag {
    type Err = Error;

    /// Case-insensitive; `point_cloud` and `point-cloud` are accepted too.
    fn from_str(s: &str) -> Result<Self> {
        let folded: String = s.chars().filter(|c| *c != '_' && *c != '-').flat_map(char::to_lowercase).collect();
        ModalityTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(&folded))
            .ok_or_else(|| Error::UnknownModality(s.to_owned()))
    }
}

impl Serialize for ModalityTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ModalityTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One unit-normalized embedding tagged with its source modality.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct ModalityFeature<T: Scalar> {
    tag: ModalityTag,
    embedding: EmbeddingVector<T>,
}

impl<T: Scalar> ModalityFeature<T> {
    /// Normalizes `raw` on ingest.
    pub fn new(tag: ModalityTag, raw: Vec<T>) -> Result<Self> {
        let values = normalize_slice(&raw)?;
        Ok(Self { tag, embedding: EmbeddingVector::new(values)? })
    }

    /// Accepts an already unit-length vector as-is (within 1e-6).
    pub fn from_unit(tag: ModalityTag, embedding: EmbeddingVector<T>) -> Result<Self> {
        let norm = embedding.norm();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { tag, embedding })
    }

    pub fn tag(&self) -> ModalityTag {
        self.tag
    }

    pub fn embedding(&self) -> &EmbeddingVector<T> {
        &self.embedding
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim()
    }
}

/// Checks a pipeline input set: 1..=7 features, unique tags, one shared dim.
/// Returns the shared dimension.
pub fn validate_feature_set<T: Scalar>(features: &[ModalityFeature<T>]) -> Result<usize> {
    let first = features.first().ok_or(Error::EmptyInput)?;
    if features.len() > ModalityTag::ALL.len() {
        return Err(Error::TooManyFeatures(features.len()));
    }
    let mut seen = BTreeSet::new();
    for f in features {
        if !seen.insert(f.tag) {
            return Err(Error::DuplicateModality(f.tag));
        }
        check_dim(first.dim(), f.dim())?;
    }
    Ok(first.dim())
}

/// References to `features` in canonical modality order. All reductions over a
/// feature set run in this order, so results do not depend on input order.
pub(crate) fn canonical_order<T: Scalar>(features: &[ModalityFeature<T>]) -> Vec<&ModalityFeature<T>> {
    let mut refs: Vec<_> = features.iter().collect();
    refs.sort_by_key(|f| f.tag);
    refs
}

fn common_dim<T: Scalar>(features: &[ModalityFeature<T>]) -> Result<usize> {
    let first = features.first().ok_or(Error::EmptyInput)?;
    for f in features {
        check_dim(first.dim(), f.dim())?;
    }
    Ok(first.dim())
}

fn mean_wide<T: Scalar>(features: &[ModalityFeature<T>]) -> Result<Vec<f64>> {
    let dim = common_dim(features)?;
    let mut acc = vec![0.0f64; dim];
    for f in canonical_order(features) {
        for (a, x) in acc.iter_mut().zip(f.embedding.as_slice()) {
            *a += x.widen();
        }
    }
    let m = features.len() as f64;
    Ok(acc.into_iter().map(|a| a / m).collect())
}

/// Element-wise arithmetic mean of the features, not renormalized.
pub fn mean_feature<T: Scalar>(features: &[ModalityFeature<T>]) -> Result<EmbeddingVector<T>> {
    EmbeddingVector::new(mean_wide(features)?.into_iter().map(T::narrow).collect())
}

/// Spread of the input distribution, `V = 1 − ‖mean‖²`, clamped to `[0, 1]`.
///
/// For unit-norm inputs this equals the mean squared distance to the
/// centroid, which is how it is evaluated: that form has no cancellation,
/// is never negative, and is exactly zero when all inputs coincide.
pub fn total_variance<T: Scalar>(features: &[ModalityFeature<T>]) -> Result<f64> {
    let mean = mean_wide(features)?;
    let mut acc = 0.0f64;
    for f in canonical_order(features) {
        for (x, c) in f.embedding.as_slice().iter().zip(&mean) {
            let d = x.widen() - c;
            acc += d * d;
        }
    }
    Ok((acc / features.len() as f64).clamp(0.0, 1.0))
}
