//! Immutable word→embedding banks built from a lexicon.
//!
//! A bank materializes one knowledge graph (entity nouns or attribute
//! adjectives) as a row-major `count × dim` block of unit `f32` rows, with
//! entries kept in ascending lexicographic word order.

mod format;
mod jsonl;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use format::{load_bank, save_bank, BankHeader, MAGIC};
pub use jsonl::{import_jsonl, parse_jsonl};

use crate::error::{Error, Result};
use crate::vector::{check_dim, normalize_slice, EmbeddingVector};

pub const MAX_WORD_BYTES: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconKind {
    Noun,
    Adjective,
}

impl LexiconKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LexiconKind::Noun => "noun",
            LexiconKind::Adjective => "adjective",
        }
    }
}

impl fmt::Display for LexiconKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LexiconKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noun" | "nouns" => Ok(LexiconKind::Noun),
            "adjective" | "adjectives" | "adj" => Ok(LexiconKind::Adjective),
            _ => Err(Error::InvalidConfig(format!("unknown lexicon kind {s:?}"))),
        }
    }
}

/// One lexicon word with its text embedding. `keep` is the abstractness
/// filter verdict for adjectives and always `true` for nouns.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub kind: LexiconKind,
    pub keep: bool,
    pub embedding: EmbeddingVector<f64>,
}

impl LexiconEntry {
    pub fn new(word: impl Into<String>, kind: LexiconKind, keep: bool, embedding: Vec<f64>) -> Result<Self> {
        let word = word.into();
        validate_word(&word)?;
        let embedding = EmbeddingVector::new(normalize_slice(&embedding)?)?;
        Ok(Self { word, kind, keep: keep || kind == LexiconKind::Noun, embedding })
    }
}

pub(crate) fn validate_word(word: &str) -> Result<()> {
    if word.is_empty() {
        return Err(Error::InvalidWord { word: word.into(), reason: "empty" });
    }
    if word.len() > MAX_WORD_BYTES {
        return Err(Error::InvalidWord { word: word.into(), reason: "longer than 255 bytes" });
    }
    Ok(())
}

/// Read access to a list of embedding rows, either a whole bank or a view.
pub trait EmbeddingSource {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn word(&self, i: usize) -> &str;
    fn row(&self, i: usize) -> &[f32];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Contiguous row-major storage of all rows, when available.
    fn contiguous(&self) -> Option<&[f32]> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBank {
    kind: LexiconKind,
    dim: usize,
    words: Vec<String>,
    keep: Vec<bool>,
    matrix: Vec<f32>,
}

/// Validates, sorts, and re-normalizes `entries` into a bank.
pub fn build_bank(entries: Vec<LexiconEntry>, kind: LexiconKind) -> Result<EmbeddingBank> {
    let first = entries.first().ok_or(Error::EmptyLexicon)?;
    let dim = first.embedding.dim();
    let mut seen = HashSet::with_capacity(entries.len());
    for e in &entries {
        if e.kind != kind {
            return Err(Error::WrongKind { expected: kind, found: e.kind });
        }
        validate_word(&e.word)?;
        check_dim(dim, e.embedding.dim())?;
        if !seen.insert(e.word.as_str()) {
            return Err(Error::DuplicateWord(e.word.clone()));
        }
    }

    let mut entries = entries;
    entries.sort_by(|a, b| a.word.cmp(&b.word));

    let mut words = Vec::with_capacity(entries.len());
    let mut keep = Vec::with_capacity(entries.len());
    let mut matrix = Vec::with_capacity(entries.len() * dim);
    for e in entries {
        let unit = normalize_slice(e.embedding.as_slice())?;
        matrix.extend(unit.iter().map(|&x| x as f32));
        keep.push(e.keep || kind == LexiconKind::Noun);
        words.push(e.word);
    }
    Ok(EmbeddingBank { kind, dim, words, keep, matrix })
}

impl EmbeddingBank {
    pub(crate) fn from_parts(
        kind: LexiconKind,
        dim: usize,
        words: Vec<String>,
        keep: Vec<bool>,
        matrix: Vec<f32>,
    ) -> Self {
        debug_assert_eq!(words.len(), keep.len());
        debug_assert_eq!(words.len() * dim, matrix.len());
        Self { kind, dim, words, keep, matrix }
    }

    pub fn kind(&self) -> LexiconKind {
        self.kind
    }

    pub fn count(&self) -> usize {
        self.words.len()
    }

    pub fn header(&self) -> BankHeader {
        BankHeader { kind: self.kind, dim: self.dim as u32, count: self.words.len() as u64, normalized: true }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn keep(&self, i: usize) -> bool {
        self.keep[i]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|k| **k).count()
    }

    /// Row-major `count × dim` embedding block.
    pub fn matrix(&self) -> &[f32] {
        &self.matrix
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.words.binary_search_by(|w| w.as_str().cmp(word)).ok()
    }

    pub fn embedding(&self, word: &str) -> Option<&[f32]> {
        self.index_of(word).map(|i| self.row(i))
    }

    /// The whole bank as a view.
    pub fn full_view(&self) -> BankView<'_> {
        BankView { bank: self, indices: None }
    }
}

impl EmbeddingSource for EmbeddingBank {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.words.len()
    }

    fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    fn contiguous(&self) -> Option<&[f32]> {
        Some(&self.matrix)
    }
}

/// A bank, optionally restricted to a subset of its entries. View index `i`
/// maps to base index `base_index(i)`; surviving entries keep their relative
/// order.
#[derive(Debug, Clone)]
pub struct BankView<'a> {
    bank: &'a EmbeddingBank,
    indices: Option<Vec<usize>>,
}

impl<'a> BankView<'a> {
    pub fn bank(&self) -> &'a EmbeddingBank {
        self.bank
    }

    pub fn base_index(&self, i: usize) -> usize {
        match &self.indices {
            Some(ix) => ix[i],
            None => i,
        }
    }

    pub fn is_filtered(&self) -> bool {
        self.indices.is_some()
    }
}

impl EmbeddingSource for BankView<'_> {
    fn dim(&self) -> usize {
        self.bank.dim
    }

    fn len(&self) -> usize {
        self.indices.as_ref().map_or(self.bank.count(), Vec::len)
    }

    fn word(&self, i: usize) -> &str {
        self.bank.word(self.base_index(i))
    }

    fn row(&self, i: usize) -> &[f32] {
        self.bank.row(self.base_index(i))
    }

    fn contiguous(&self) -> Option<&[f32]> {
        match self.indices {
            None => Some(&self.bank.matrix),
            Some(_) => None,
        }
    }
}

/// Restricts an adjective bank to its `keep = true` entries when `enabled`.
pub fn apply_adjective_filter(bank: &EmbeddingBank, enabled: bool) -> Result<BankView<'_>> {
    if bank.kind != LexiconKind::Adjective {
        return Err(Error::WrongKind { expected: LexiconKind::Adjective, found: bank.kind });
    }
    if !enabled {
        return Ok(bank.full_view());
    }
    let indices = (0..bank.count()).filter(|&i| bank.keep[i]).collect();
    Ok(BankView { bank, indices: Some(indices) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(word: &str, kind: LexiconKind, keep: bool, e: &[f64]) -> LexiconEntry {
        LexiconEntry::new(word, kind, keep, e.to_vec()).unwrap()
    }

    fn noun(word: &str, e: &[f64]) -> LexiconEntry {
        entry(word, LexiconKind::Noun, true, e)
    }

    #[test]
    fn sorted_lexicographically() {
        let b = build_bank(
            vec![noun("dog", &[0., 1., 0.]), noun("cat", &[1., 0., 0.]), noun("car", &[0., 0., 1.])],
            LexiconKind::Noun,
        )
        .unwrap();
        assert_eq!(b.words(), ["car", "cat", "dog"]);
        assert_eq!(b.row(1), &[1.0, 0.0, 0.0]);
        assert_eq!(b.embedding("dog").unwrap(), &[0.0, 1.0, 0.0]);
        assert_eq!(b.index_of("cow"), None);
    }

    #[test]
    fn duplicate_word() {
        let r = build_bank(vec![noun("cat", &[1., 0.]), noun("cat", &[0., 1.])], LexiconKind::Noun);
        assert!(matches!(r, Err(Error::DuplicateWord(w)) if w == "cat"));
    }

    #[test]
    fn words_are_case_sensitive() {
        let b = build_bank(vec![noun("Cat", &[1., 0.]), noun("cat", &[0., 1.])], LexiconKind::Noun).unwrap();
        assert_eq!(b.words(), ["Cat", "cat"]);
    }

    #[test]
    fn empty_and_mismatch() {
        assert!(matches!(build_bank(vec![], LexiconKind::Noun), Err(Error::EmptyLexicon)));
        let r = build_bank(vec![noun("a", &[1., 0.]), noun("b", &[1., 0., 0.])], LexiconKind::Noun);
        assert!(matches!(r, Err(Error::DimMismatch { expected: 2, found: 3 })));
        let r = build_bank(vec![noun("a", &[1., 0.])], LexiconKind::Adjective);
        assert!(matches!(r, Err(Error::WrongKind { .. })));
    }

    #[test]
    fn bad_words() {
        assert!(LexiconEntry::new("", LexiconKind::Noun, true, vec![1.0]).is_err());
        assert!(LexiconEntry::new("x".repeat(256), LexiconKind::Noun, true, vec![1.0]).is_err());
        assert!(LexiconEntry::new("x".repeat(255), LexiconKind::Noun, true, vec![1.0]).is_ok());
    }

    #[test]
    fn nouns_always_kept() {
        let e = entry("cat", LexiconKind::Noun, false, &[1.0]);
        assert!(e.keep);
    }

    #[test]
    fn filter_view() {
        let adj = |w: &str, keep: bool| entry(w, LexiconKind::Adjective, keep, &[1., 1.]);
        let b = build_bank(vec![adj("a", true), adj("b", false), adj("c", true)], LexiconKind::Adjective).unwrap();
        let v = apply_adjective_filter(&b, true).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!((v.word(0), v.word(1)), ("a", "c"));
        assert_eq!((v.base_index(0), v.base_index(1)), (0, 2));
        let full = apply_adjective_filter(&b, false).unwrap();
        assert_eq!(full.len(), 3);
        assert!(!full.is_filtered());
    }

    #[test]
    fn filter_all_kept_is_identity() {
        let adj = |w: &str| entry(w, LexiconKind::Adjective, true, &[0., 1.]);
        let b = build_bank(vec![adj("x"), adj("y")], LexiconKind::Adjective).unwrap();
        let v = apply_adjective_filter(&b, true).unwrap();
        assert_eq!(v.len(), b.count());
        for i in 0..v.len() {
            assert_eq!(v.word(i), b.word(i));
            assert_eq!(v.row(i), b.row(i));
        }
    }

    #[test]
    fn filter_on_noun_bank() {
        let b = build_bank(vec![noun("cat", &[1.0])], LexiconKind::Noun).unwrap();
        assert!(matches!(apply_adjective_filter(&b, true), Err(Error::WrongKind { .. })));
    }
}
