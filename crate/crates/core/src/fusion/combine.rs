use crate::config::FusionConfig;
use crate::error::{Error, Result};
use crate::feature::{total_variance, ModalityFeature};
use crate::scalar::Scalar;
use crate::vector::{check_dim, normalize_wide, EmbeddingVector};

/// Output of the variance-gated combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct Combined<T: Scalar> {
    pub c1: EmbeddingVector<T>,
    pub variance: f64,
    /// Share of the entity-fused vector in `c1`.
    pub alpha: f64,
}

/// Mixes the branch outputs as `alpha · f_e + (1 − alpha) · f_att`, with
/// `alpha = balanced_weight` while the input spread stays below
/// `variance_threshold` and `entity_upweight` once it reaches it.
///
/// With one branch absent the surviving vector passes through unchanged
/// (`alpha` = 1 for entity-only, 0 for attribute-only).
pub fn threshold_fuse<T: Scalar>(
    entity: Option<&EmbeddingVector<T>>,
    attribute: Option<&EmbeddingVector<T>>,
    features: &[ModalityFeature<T>],
    config: &FusionConfig,
) -> Result<Combined<T>> {
    let variance = total_variance(features)?;
    let (c1, alpha) = match (entity, attribute) {
        (None, None) => return Err(Error::NoBranches),
        (Some(e), None) => (e.clone(), 1.0),
        (None, Some(a)) => (a.clone(), 0.0),
        (Some(e), Some(a)) => {
            check_dim(e.dim(), a.dim())?;
            let alpha =
                if variance < config.variance_threshold { config.balanced_weight } else { config.entity_upweight };
            let c1 = if alpha == 1.0 {
                e.clone()
            } else if alpha == 0.0 {
                a.clone()
            } else {
                let acc: Vec<f64> = e
                    .as_slice()
                    .iter()
                    .zip(a.as_slice())
                    .map(|(x, y)| alpha * x.widen() + (1.0 - alpha) * y.widen())
                    .collect();
                normalize_wide(&acc)?
            };
            (c1, alpha)
        }
    };
    Ok(Combined { c1, variance, alpha })
}
