use std::path::{Path, PathBuf};

use imgany_core::FusionConfig;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Service settings. The TOML form is flat: fusion knobs sit next to the
/// service keys.
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// nouns = "nouns.imgb"
/// adjectives = "adjectives.imgb"
/// k_entity = 4
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceConfig {
    pub listen: String,
    pub nouns: PathBuf,
    pub adjectives: PathBuf,
    pub decoder_endpoint: Option<String>,
    #[serde(flatten)]
    pub fusion: FusionConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceKeys {
    #[serde(default = "default_listen")]
    listen: String,
    nouns: PathBuf,
    adjectives: PathBuf,
    #[serde(default)]
    decoder_endpoint: Option<String>,
}

const SERVICE_KEYS: [&str; 4] = ["listen", "nouns", "adjectives", "decoder_endpoint"];

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

impl ServiceConfig {
    pub fn new(nouns: impl Into<PathBuf>, adjectives: impl Into<PathBuf>) -> Self {
        Self {
            listen: default_listen(),
            nouns: nouns.into(),
            adjectives: adjectives.into(),
            decoder_endpoint: None,
            fusion: FusionConfig::default(),
        }
    }

    /// Parses TOML. Relative bank paths resolve against `base` when given.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self, ServiceError> {
        // Split the flat table by hand: serde's flatten would silently accept
        // misspelled fusion keys.
        let bad = |e: toml::de::Error| ServiceError::Config(e.to_string());
        let mut fusion: toml::Table = toml::from_str(text).map_err(bad)?;
        let mut service = toml::Table::new();
        for key in SERVICE_KEYS {
            if let Some(v) = fusion.remove(key) {
                service.insert(key.to_string(), v);
            }
        }
        let keys: ServiceKeys = service.try_into().map_err(bad)?;
        let fusion: FusionConfig = fusion.try_into().map_err(bad)?;
        let mut cfg = ServiceConfig {
            listen: keys.listen,
            nouns: keys.nouns,
            adjectives: keys.adjectives,
            decoder_endpoint: keys.decoder_endpoint,
            fusion,
        };
        if let Some(base) = base {
            for p in [&mut cfg.nouns, &mut cfg.adjectives] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ServiceError::ConfigRead { path: path.to_path_buf(), source })?;
        Self::from_toml(&text, path.parent())
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        self.fusion.validate().map_err(|e| ServiceError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layout() {
        let c = ServiceConfig::from_toml(
            "listen = \"0.0.0.0:9\"\nnouns = \"n.imgb\"\nadjectives = \"a.imgb\"\nk_entity = 7\nenable_adjective_filter = false\n",
            Some(Path::new("/srv")),
        )
        .unwrap();
        assert_eq!(c.listen, "0.0.0.0:9");
        assert_eq!(c.nouns, Path::new("/srv/n.imgb"));
        assert_eq!(c.fusion.k_entity, 7);
        assert_eq!(c.fusion.k_attribute, 4);
        assert!(!c.fusion.enable_adjective_filter);
    }

    #[test]
    fn unknown_key_rejected() {
        let e = ServiceConfig::from_toml("nouns = \"n\"\nadjectives = \"a\"\nk_entitty = 3\n", None).unwrap_err();
        assert!(e.to_string().contains("k_entitty"), "{e}");
    }

    #[test]
    fn missing_bank_key_rejected() {
        assert!(ServiceConfig::from_toml("nouns = \"n\"\n", None).is_err());
    }

    #[test]
    fn invalid_fusion_values_rejected() {
        let e = ServiceConfig::from_toml(
            "nouns = \"n\"\nadjectives = \"a\"\nenable_entity_branch = false\nenable_attribute_branch = false\n",
            None,
        )
        .unwrap_err();
        assert!(matches!(e, ServiceError::Config(_)));
    }
}
