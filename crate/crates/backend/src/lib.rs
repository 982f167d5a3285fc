//! The boundary between the fusion engine and the models around it.
//!
//! Encoders turn media into shared-space embeddings and a decoder turns a
//! [`imgany_core::ConditionBundle`] into an image. Both live in an external
//! process; this crate holds their request types, async HTTP clients, and a
//! deterministic [`mock_encode`] that stands in for real encoders in tests.

pub mod error;
pub mod mock;
pub mod remote;

pub use error::{BackendError, Result};
pub use mock::{mock_encode, mock_seed, synthetic_entries, synthetic_lexicon, NOUN_TEMPLATE};
pub use remote::{
    is_png, DecodeRequest, DecoderClient, EncodeRequest, EncodeResponse, EncoderClient, RetryPolicy, PNG_SIGNATURE,
};
