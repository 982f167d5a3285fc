//! Line-delimited JSON lexicon ingest:
//! `{"word": "cat", "keep": true, "embedding": [0.1, ...]}` per line.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::bank::{LexiconEntry, LexiconKind};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Line {
    word: String,
    #[serde(default = "default_keep")]
    keep: bool,
    embedding: Vec<f64>,
}

fn default_keep() -> bool {
    true
}

pub fn import_jsonl(path: impl AsRef<Path>, kind: LexiconKind) -> Result<Vec<LexiconEntry>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(BufReader::new(file), kind).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses lexicon lines; blank lines are skipped but still counted for
/// error line numbers (1-based).
pub fn parse_jsonl(reader: impl BufRead, kind: LexiconKind) -> Result<Vec<LexiconEntry>> {
    let mut entries: Vec<LexiconEntry> = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io("<lexicon>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        if let Some(first) = entries.first() {
            if first.embedding.dim() != parsed.embedding.len() {
                return Err(Error::DimMismatch { expected: first.embedding.dim(), found: parsed.embedding.len() });
            }
        }
        if !seen.insert(parsed.word.clone()) {
            return Err(Error::DuplicateWord(parsed.word));
        }
        let entry = LexiconEntry::new(parsed.word, kind, parsed.keep, parsed.embedding)
            .map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        entries.push(entry);
    }
    Ok(entries)
}
