//! Fusion weights and the condition bundle handed to the decoder.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::FusionConfig;
use crate::error::{Error, Result};
use crate::feature::ModalityTag;
use crate::scalar::Scalar;
use crate::vector::EmbeddingVector;

/// Sums at or below this fall back to uniform weights.
pub const WEIGHT_SUM_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Entity,
    Attribute,
}

/// Per-modality scalar weights: the raw formula values and their
/// clamped-linear normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FusionWeights<T: Scalar> {
    pub kind: WeightKind,
    pub raw: BTreeMap<ModalityTag, T>,
    pub normalized: BTreeMap<ModalityTag, T>,
}

impl<T: Scalar> FusionWeights<T> {
    /// Clamps raw values at zero and divides by their sum. A sum at or below
    /// [`WEIGHT_SUM_FLOOR`] yields the uniform distribution.
    pub fn from_raw(kind: WeightKind, raw: BTreeMap<ModalityTag, f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        if raw.values().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sum: f64 = raw.values().map(|w| w.max(0.0)).sum();
        let m = raw.len() as f64;
        let normalized = raw
            .iter()
            .map(|(&tag, &w)| {
                let n = if sum <= WEIGHT_SUM_FLOOR { 1.0 / m } else { w.max(0.0) / sum };
                (tag, T::narrow(n))
            })
            .collect();
        let raw = raw.into_iter().map(|(tag, w)| (tag, T::narrow(w))).collect();
        Ok(Self { kind, raw, normalized })
    }

    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }

    pub fn normalized_sum(&self) -> f64 {
        self.normalized.values().map(|w| w.widen()).sum()
    }
}

/// The engine's product: fused embedding, entity words, attribute words, and
/// the diagnostics that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ConditionBundle<T: Scalar> {
    /// Unit-normalized fused feature.
    pub c1: EmbeddingVector<T>,
    /// Entity words joined by `", "`; empty when the entity branch is off.
    pub c2: String,
    /// Attribute words joined by `", "`; empty when the attribute branch is off.
    pub c3: String,
    pub entity_weights: Option<FusionWeights<T>>,
    pub attribute_weights: Option<FusionWeights<T>>,
    pub variance: f64,
    /// Entity share applied by the threshold combiner.
    pub alpha: f64,
    #[serde(rename = "config")]
    pub config_echo: FusionConfig,
}
