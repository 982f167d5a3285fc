use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs for one fusion run. The defaults reproduce the published setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    /// Entity words retrieved per modality.
    pub k_entity: usize,
    /// Attribute words retrieved from the mean feature.
    pub k_attribute: usize,
    /// Spread at or above which the entity share is raised.
    pub variance_threshold: f64,
    /// Entity share used when the spread reaches `variance_threshold`.
    pub entity_upweight: f64,
    /// Entity share used below the threshold.
    pub balanced_weight: f64,
    pub enable_entity_branch: bool,
    pub enable_attribute_branch: bool,
    pub enable_adjective_filter: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            k_entity: 4,
            k_attribute: 4,
            variance_threshold: 0.8,
            entity_upweight: 0.6,
            balanced_weight: 0.5,
            enable_entity_branch: true,
            enable_attribute_branch: true,
            enable_adjective_filter: true,
        }
    }
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {x}")))
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_entity == 0 {
            return Err(Error::InvalidConfig("k_entity must be at least 1".into()));
        }
        if self.k_attribute == 0 {
            return Err(Error::InvalidConfig("k_attribute must be at least 1".into()));
        }
        unit_interval("variance_threshold", self.variance_threshold)?;
        unit_interval("entity_upweight", self.entity_upweight)?;
        unit_interval("balanced_weight", self.balanced_weight)?;
        if !self.enable_entity_branch && !self.enable_attribute_branch {
            return Err(Error::NoBranches);
        }
        Ok(())
    }

    /// Attribute share paired with `entity_upweight`.
    pub fn attribute_downweight(&self) -> f64 {
        1.0 - self.entity_upweight
    }

    pub fn with_overrides(mut self, o: &FusionConfigOverrides) -> Self {
        macro_rules! apply {
            ($($f:ident),*) => {$( if let Some(v) = o.$f { self.$f = v; } )*};
        }
        apply!(
            k_entity,
            k_attribute,
            variance_threshold,
            entity_upweight,
            balanced_weight,
            enable_entity_branch,
            enable_attribute_branch,
            enable_adjective_filter
        );
        self
    }
}

/// Partial config; `None` fields keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfigOverrides {
    pub k_entity: Option<usize>,
    pub k_attribute: Option<usize>,
    pub variance_threshold: Option<f64>,
    pub entity_upweight: Option<f64>,
    pub balanced_weight: Option<f64>,
    pub enable_entity_branch: Option<bool>,
    pub enable_attribute_branch: Option<bool>,
    pub enable_adjective_filter: Option<bool>,
}

impl FusionConfigOverrides {
    /// Layers `self` on top of `lower`: fields set here win.
    pub fn over(&self, lower: &FusionConfigOverrides) -> FusionConfigOverrides {
        FusionConfigOverrides {
            k_entity: self.k_entity.or(lower.k_entity),
            k_attribute: self.k_attribute.or(lower.k_attribute),
            variance_threshold: self.variance_threshold.or(lower.variance_threshold),
            entity_upweight: self.entity_upweight.or(lower.entity_upweight),
            balanced_weight: self.balanced_weight.or(lower.balanced_weight),
            enable_entity_branch: self.enable_entity_branch.or(lower.enable_entity_branch),
            enable_attribute_branch: self.enable_attribute_branch.or(lower.enable_attribute_branch),
            enable_adjective_filter: self.enable_adjective_filter.or(lower.enable_adjective_filter),
        }
    }
}
