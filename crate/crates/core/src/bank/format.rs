//! Binary bank file.
//!
//! ```text
//! magic  "IMGB1"                 5 bytes
//! kind   0 = noun, 1 = adjective 1 byte
//! flags  bit0 = normalized       1 byte
//! dim    u32 LE
//! count  u64 LE
//! count × [word_len u16 LE | word bytes | keep u8]
//! count × dim f32 LE, row-major
//! crc32  u32 LE over every byte after the magic
//! ```

use std::fs;
use std::path::Path;

use crate::bank::{validate_word, EmbeddingBank, EmbeddingSource, LexiconKind};
use crate::error::{Error, Result};
use crate::vector::UNIT_TOLERANCE;

pub const MAGIC: [u8; 5] = *b"IMGB1";
const MAGIC_FAMILY: &[u8; 4] = b"IMGB";
const FLAG_NORMALIZED: u8 = 0b0000_0001;
const FIXED_HEADER: usize = 5 + 1 + 1 + 4 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankHeader {
    pub kind: LexiconKind,
    pub dim: u32,
    pub count: u64,
    pub normalized: bool,
}

impl EmbeddingBank {
    pub fn to_bytes(&self) -> Vec<u8> {
        let words_len: usize = self.words.iter().map(|w| 2 + w.len() + 1).sum();
        let mut out = Vec::with_capacity(FIXED_HEADER + words_len + self.matrix.len() * 4 + 4);
        out.extend_from_slice(&MAGIC);
        out.push(match self.kind {
            LexiconKind::Noun => 0,
            LexiconKind::Adjective => 1,
        });
        out.push(FLAG_NORMALIZED);
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.words.len() as u64).to_le_bytes());
        for (word, keep) in self.words.iter().zip(&self.keep) {
            out.extend_from_slice(&(word.len() as u16).to_le_bytes());
            out.extend_from_slice(word.as_bytes());
            out.push(u8::from(*keep));
        }
        for x in &self.matrix {
            out.extend_from_slice(&x.to_le_bytes());
        }
        let crc = crc32fast::hash(&out[MAGIC.len()..]);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let magic: [u8; 5] = bytes.get(..5).ok_or(Error::TruncatedFile)?.try_into().expect("slice of length 5");
        if magic != MAGIC {
            if magic.starts_with(MAGIC_FAMILY) {
                return Err(Error::VersionUnsupported(format!("format version {:?}", char::from(magic[4]))));
            }
            return Err(Error::BadMagic(magic));
        }

        let mut r = Reader { bytes, pos: MAGIC.len() };
        let kind = match r.u8()? {
            0 => LexiconKind::Noun,
            1 => LexiconKind::Adjective,
            k => return Err(Error::MalformedBank(format!("unknown kind byte {k}"))),
        };
        let flags = r.u8()?;
        if flags & !FLAG_NORMALIZED != 0 {
            return Err(Error::VersionUnsupported(format!("unknown flags {flags:#04x}")));
        }
        if flags & FLAG_NORMALIZED == 0 {
            return Err(Error::VersionUnsupported("bank is not normalized".into()));
        }
        let dim = r.u32()? as usize;
        let count = r.u64()?;
        if dim == 0 || count == 0 {
            return Err(Error::MalformedBank(format!("dim {dim} and count {count} must be positive")));
        }

        let mut raw_words = Vec::with_capacity(count.min(bytes.len() as u64 / 4) as usize);
        for _ in 0..count {
            let len = r.u16()? as usize;
            let word = r.take(len)?;
            let keep = r.u8()?;
            raw_words.push((word, keep));
        }
        let count = raw_words.len();
        let matrix_bytes = count
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::MalformedBank("matrix size overflows".into()))?;
        let matrix_raw = r.take(matrix_bytes)?;
        let stored = r.u32()?;
        if r.pos != bytes.len() {
            return Err(Error::MalformedBank(format!("{} trailing bytes after checksum", bytes.len() - r.pos)));
        }
        let computed = crc32fast::hash(&bytes[MAGIC.len()..bytes.len() - 4]);
        if stored != computed {
            return Err(Error::ChecksumMismatch { stored, computed });
        }

        let mut words: Vec<String> = Vec::with_capacity(count);
        let mut keep = Vec::with_capacity(count);
        for (raw, k) in raw_words {
            let word = std::str::from_utf8(raw).map_err(|_| Error::MalformedBank("word is not valid UTF-8".into()))?;
            validate_word(word).map_err(|e| Error::MalformedBank(e.to_string()))?;
            if let Some(prev) = words.last() {
                if word <= prev.as_str() {
                    return Err(Error::MalformedBank(format!("entries out of order or duplicated at {word:?}")));
                }
            }
            let k = match k {
                0 => false,
                1 => true,
                other => return Err(Error::MalformedBank(format!("keep byte {other} for {word:?}"))),
            };
            if kind == LexiconKind::Noun && !k {
                return Err(Error::MalformedBank(format!("noun {word:?} has keep = false")));
            }
            words.push(word.to_owned());
            keep.push(k);
        }

        let matrix: Vec<f32> =
            matrix_raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let bank = EmbeddingBank::from_parts(kind, dim, words, keep, matrix);
        for i in 0..bank.count() {
            let row = bank.row(i);
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedBank(format!("row {i} is not finite")));
            }
            let norm = crate::scalar::norm_sq_wide(row).sqrt();
            if (norm - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::MalformedBank(format!("row {i} has norm {norm}")));
            }
        }
        Ok(bank)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::TruncatedFile)?;
        let s = self.bytes.get(self.pos..end).ok_or(Error::TruncatedFile)?;
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("exact length"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        self.array().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.array().map(u64::from_le_bytes)
    }
}

pub fn save_bank(bank: &EmbeddingBank, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bank.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_bank(path: impl AsRef<Path>) -> Result<EmbeddingBank> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    EmbeddingBank::from_bytes(&bytes)
}
