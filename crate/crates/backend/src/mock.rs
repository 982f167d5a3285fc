//! Deterministic stand-in encoder.
//!
//! The payload text and modality name are hashed into a seed for a ChaCha
//! stream, which drives `dim` standard normal draws. Directions are uniform on
//! the sphere, so distinct payloads are nearly orthogonal in high dimension.

use imgany_core::{build_bank, EmbeddingBank, LexiconEntry, LexiconKind, ModalityFeature, ModalityTag, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::error::{BackendError, Result};

/// Text wrapped around a noun before encoding it for the entity bank.
pub const NOUN_TEMPLATE: &str = "a photo of a ";

/// Stable 64-bit seed for `(modality, payload)`: the first eight bytes of
/// SHA-256 over the modality name, a NUL separator, and the payload.
pub fn mock_seed(tag: ModalityTag, payload: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(tag.name().as_bytes());
    h.update([0u8]);
    h.update(payload.as_bytes());
    let digest = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(b)
}

fn unit_draws(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // A zero draw vector is not a realistic outcome, but the loop keeps
        // the function total.
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn mock_encode<T: Scalar>(tag: ModalityTag, payload: &str, dim: usize) -> Result<ModalityFeature<T>> {
    if dim < 2 {
        return Err(BackendError::InvalidRequest(format!("mock dimension must be at least 2, got {dim}")));
    }
    let v = unit_draws(mock_seed(tag, payload), dim);
    Ok(ModalityFeature::new(tag, v.into_iter().map(T::narrow).collect())?)
}

/// Lexicon entries for `words`, embedded as text. Nouns use
/// [`NOUN_TEMPLATE`]; adjectives are embedded bare. `keep` decides each
/// adjective's concreteness flag.
pub fn synthetic_entries<'a>(
    kind: LexiconKind,
    words: impl IntoIterator<Item = &'a str>,
    dim: usize,
    keep: impl Fn(&str) -> bool,
) -> Result<Vec<LexiconEntry>> {
    words
        .into_iter()
        .map(|w| {
            let text = match kind {
                LexiconKind::Noun => format!("{NOUN_TEMPLATE}{w}"),
                LexiconKind::Adjective => w.to_string(),
            };
            let f = mock_encode::<f64>(ModalityTag::Text, &text, dim)?;
            let keep = kind == LexiconKind::Noun || keep(w);
            Ok(LexiconEntry::new(w, kind, keep, f.embedding().as_slice().to_vec())?)
        })
        .collect()
}

/// A bank of `n` generated words (`noun_0000`, `adjective_0001`, ...). For
/// adjectives the first `dropped` words get `keep = false`.
pub fn synthetic_lexicon(kind: LexiconKind, n: usize, dim: usize, dropped: usize) -> Result<EmbeddingBank> {
    let words: Vec<String> = (0..n).map(|i| format!("{kind}_{i:04}")).collect();
    let cut: Vec<&str> = words.iter().take(dropped).map(String::as_str).collect();
    let entries = synthetic_entries(kind, words.iter().map(String::as_str), dim, |w| !cut.contains(&w))?;
    Ok(build_bank(entries, kind)?)
}
