//! Embedding vectors and the primitive operations on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot_wide, norm_sq_wide, Scalar};

/// Norms at or below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// Tolerance on `| ‖v‖ − 1 |` for vectors accepted as unit-normalized.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// A finite, non-empty coordinate array in the shared representation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EmbeddingVector<T: Scalar> {
    values: Vec<T>,
}

impl<T: Scalar> EmbeddingVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values })
    }

    /// Widening conversion from an `f32` slice (bank rows).
    pub fn from_f32(values: &[f32]) -> Result<Self> {
        Self::new(values.iter().map(|&x| T::narrow(x as f64)).collect())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<T> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        norm_sq_wide(&self.values).sqrt()
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot_wide(&self.values, &other.values))
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }

    /// Multiplies every coordinate by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| x * c).collect())
    }

    pub fn cast<U: Scalar>(&self) -> EmbeddingVector<U> {
        EmbeddingVector { values: self.values.iter().map(|x| U::narrow(x.widen())).collect() }
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for EmbeddingVector<T> {
    type Error = Error;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

impl<T: Scalar> From<EmbeddingVector<T>> for Vec<T> {
    fn from(v: EmbeddingVector<T>) -> Self {
        v.values
    }
}

impl<T: Scalar> AsRef<[T]> for EmbeddingVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.values
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, found })
    }
}

/// Scales `v` to unit Euclidean length.
pub fn normalize<T: Scalar>(v: &EmbeddingVector<T>) -> Result<EmbeddingVector<T>> {
    normalize_slice(v.as_slice()).map(|values| EmbeddingVector { values })
}

/// Unit-normalizes a raw coordinate slice; the norm is accumulated in `f64`.
pub fn normalize_slice<T: Scalar>(values: &[T]) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = norm_sq_wide(values).sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm <= ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    Ok(values.iter().map(|&x| T::narrow(x.widen() / norm)).collect())
}

/// Normalizes an `f64` accumulator into the target element type.
pub(crate) fn normalize_wide<T: Scalar>(acc: &[f64]) -> Result<EmbeddingVector<T>> {
    let values = normalize_slice(acc)?;
    EmbeddingVector::new(values.into_iter().map(T::narrow).collect())
}
