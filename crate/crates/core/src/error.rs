use std::fmt;
use std::path::PathBuf;

use crate::bank::LexiconKind;
use crate::feature::ModalityTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vector norm is zero or below 1e-12")]
    ZeroVector,
    #[error("vector contains a non-finite value")]
    NonFinite,
    #[error("embedding vector has no components")]
    EmptyVector,
    #[error("input is empty")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("modality {0} appears more than once")]
    DuplicateModality(ModalityTag),
    #[error("at most 7 modality features are accepted, got {0}")]
    TooManyFeatures(usize),
    #[error("unknown modality {0:?}")]
    UnknownModality(String),
    #[error("feature is not unit-normalized (norm {0})")]
    NotNormalized(f64),
    #[error("fusion weights do not cover exactly the feature modalities")]
    TagMismatch,
    #[error("entity feature set is empty")]
    EmptyEntitySet,
    #[error("attribute feature set is empty")]
    EmptyAttributeSet,
    #[error("bank has no retrievable entries")]
    EmptyBank,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("invalid fusion config: {0}")]
    InvalidConfig(String),
    #[error("at least one branch must be enabled")]
    NoBranches,
    #[error("expected a {expected} bank, got a {found} bank")]
    WrongKind { expected: LexiconKind, found: LexiconKind },

    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: &'static str },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad magic {0:?}")]
    BadMagic([u8; 5]),
    #[error("bank file is truncated")]
    TruncatedFile,
    #[error("unsupported bank version or flags: {0}")]
    VersionUnsupported(String),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("malformed bank file: {0}")]
    MalformedBank(String),

    #[error("query {index}: {source}")]
    AtQuery { index: usize, source: Box<Error> },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable identifier, used in wire error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroVector => "ZeroVector",
            Error::NonFinite => "NonFinite",
            Error::EmptyVector => "EmptyVector",
            Error::EmptyInput => "EmptyInput",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::DuplicateModality(_) => "DuplicateModality",
            Error::TooManyFeatures(_) => "TooManyFeatures",
            Error::UnknownModality(_) => "UnknownModality",
            Error::NotNormalized(_) => "NotNormalized",
            Error::TagMismatch => "TagMismatch",
            Error::EmptyEntitySet => "EmptyEntitySet",
            Error::EmptyAttributeSet => "EmptyAttributeSet",
            Error::EmptyBank => "EmptyBank",
            Error::InvalidK => "InvalidK",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NoBranches => "NoBranches",
            Error::WrongKind { .. } => "WrongKind",
            Error::DuplicateWord(_) => "DuplicateWord",
            Error::EmptyLexicon => "EmptyLexicon",
            Error::InvalidWord { .. } => "InvalidWord",
            Error::Parse { .. } => "ParseError",
            Error::BadMagic(_) => "BadMagic",
            Error::TruncatedFile => "TruncatedFile",
            Error::VersionUnsupported(_) => "VersionUnsupported",
            Error::ChecksumMismatch { .. } => "ChecksumMismatch",
            Error::MalformedBank(_) => "MalformedBank",
            Error::AtQuery { source, .. } => source.code(),
            Error::Io { .. } => "Io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

/// Pipeline step at which a fusion run failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Validate,
    EntityRetrieval,
    EntityWeights,
    EntityFusion,
    AttributeRetrieval,
    AttributeWeights,
    AttributeFusion,
    Combine,
    Assemble,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::EntityRetrieval => "entity_retrieval",
            Stage::EntityWeights => "entity_weights",
            Stage::EntityFusion => "entity_fusion",
            Stage::AttributeRetrieval => "attribute_retrieval",
            Stage::AttributeWeights => "attribute_weights",
            Stage::AttributeFusion => "attribute_fusion",
            Stage::Combine => "combine",
            Stage::Assemble => "assemble",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An [`Error`] annotated with the pipeline stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn new(stage: Stage, source: Error) -> Self {
        Self { stage, source }
    }

    pub fn code(&self) -> &'static str {
        self.source.code()
    }
}

pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}
