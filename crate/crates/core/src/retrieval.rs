//! Exact top-k cosine retrieval over an embedding bank or view.
//!
//! Hits are ordered by descending score, then ascending word, then ascending
//! index. Scores are `f64` dot products of the bank row with the unit query,
//! accumulated left to right.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bank::EmbeddingSource;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::{check_dim, normalize_slice, EmbeddingVector};

/// Rows scored per block before candidates are offered to the heap.
const BLOCK_ROWS: usize = 256;

/// Banks at least this large are split across rayon workers.
const PARALLEL_MIN_ROWS: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub word: String,
    pub score: f64,
    /// Position within the searched bank or view.
    pub bank_index: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate<'a> {
    score: f64,
    word: &'a str,
    index: usize,
}

/// `Less` means `a` ranks ahead of `b`.
fn rank(a: &Candidate<'_>, b: &Candidate<'_>) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.word.cmp(b.word)).then_with(|| a.index.cmp(&b.index))
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        rank(self, other) == Ordering::Equal
    }
}

impl Eq for Candidate<'_> {}

impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Max-heap top is the worst-ranked candidate kept so far.
impl Ord for Candidate<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        rank(self, other)
    }
}

impl Candidate<'_> {
    fn into_hit(self) -> RetrievalHit {
        RetrievalHit { word: self.word.to_owned(), score: self.score, bank_index: self.index }
    }
}

#[inline]
fn score_row(row: &[f32], query: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for (x, q) in row.iter().zip(query) {
        acc += *x as f64 * q;
    }
    acc
}

/// Validates the request and returns the unit query in `f64`.
fn prepare<S, T>(source: &S, query: &EmbeddingVector<T>, k: usize) -> Result<Vec<f64>>
where
    S: EmbeddingSource + ?Sized,
    T: Scalar,
{
    if k == 0 {
        return Err(Error::InvalidK);
    }
    check_dim(source.dim(), query.dim())?;
    let wide: Vec<f64> = query.as_slice().iter().map(|x| x.widen()).collect();
    let unit = normalize_slice(&wide)?;
    if source.is_empty() {
        return Err(Error::EmptyBank);
    }
    Ok(unit)
}

struct TopK<'a> {
    k: usize,
    heap: BinaryHeap<Candidate<'a>>,
}

impl<'a> TopK<'a> {
    fn new(k: usize) -> Self {
        Self { k, heap: BinaryHeap::with_capacity(k + 1) }
    }

    #[inline]
    fn offer(&mut self, c: Candidate<'a>) {
        if self.heap.len() < self.k {
            self.heap.push(c);
        } else if let Some(mut worst) = self.heap.peek_mut() {
            if rank(&c, &worst) == Ordering::Less {
                *worst = c;
            }
        }
    }

    /// Lowest score that could still enter the heap, if it is full.
    #[inline]
    fn floor(&self) -> Option<f64> {
        if self.heap.len() < self.k {
            None
        } else {
            self.heap.peek().map(|c| c.score)
        }
    }

    fn into_sorted(self) -> Vec<Candidate<'a>> {
        self.heap.into_sorted_vec()
    }
}

fn scan_range<'a, S>(source: &'a S, query: &[f64], k: usize, start: usize, end: usize) -> Vec<Candidate<'a>>
where
    S: EmbeddingSource + ?Sized,
{
    let dim = source.dim();
    let mut top = TopK::new(k);
    let mut scores = [0.0f64; BLOCK_ROWS];
    let mut block = start;
    while block < end {
        let block_end = (block + BLOCK_ROWS).min(end);
        let n = block_end - block;
        match source.contiguous() {
            Some(matrix) => {
                let rows = &matrix[block * dim..block_end * dim];
                for (s, row) in scores[..n].iter_mut().zip(rows.chunks_exact(dim)) {
                    *s = score_row(row, query);
                }
            }
            None => {
                for (j, s) in scores[..n].iter_mut().enumerate() {
                    *s = score_row(source.row(block + j), query);
                }
            }
        }
        for (j, &score) in scores[..n].iter().enumerate() {
            // Scores strictly below the floor cannot displace anything; ties
            // still go through the full comparison.
            if top.floor().is_some_and(|f| score < f) {
                continue;
            }
            let index = block + j;
            top.offer(Candidate { score, word: source.word(index), index });
        }
        block = block_end;
    }
    top.into_sorted()
}

fn top_k_sharded<S>(source: &S, query: &[f64], k: usize, shard_rows: usize) -> Vec<RetrievalHit>
where
    S: EmbeddingSource + Sync + ?Sized,
{
    let n = source.len();
    let shards: Vec<(usize, usize)> = (0..n).step_by(shard_rows).map(|s| (s, (s + shard_rows).min(n))).collect();
    let mut merged: Vec<Candidate<'_>> =
        shards.into_par_iter().flat_map_iter(|(s, e)| scan_range(source, query, k, s, e)).collect();
    merged.sort_unstable_by(rank);
    merged.truncate(k);
    merged.into_iter().map(Candidate::into_hit).collect()
}

/// The `min(k, len)` best hits for `query`.
pub fn retrieve_top_k<S, T>(source: &S, query: &EmbeddingVector<T>, k: usize) -> Result<Vec<RetrievalHit>>
where
    S: EmbeddingSource + Sync + ?Sized,
    T: Scalar,
{
    let q = prepare(source, query, k)?;
    if source.len() >= PARALLEL_MIN_ROWS {
        let shard = source.len().div_ceil(rayon::current_num_threads().max(1));
        return Ok(top_k_sharded(source, &q, k, shard.max(BLOCK_ROWS)));
    }
    Ok(scan_range(source, &q, k, 0, source.len()).into_iter().map(Candidate::into_hit).collect())
}

/// Reference implementation: score every row, sort everything, take `k`.
pub fn retrieve_top_k_oracle<S, T>(source: &S, query: &EmbeddingVector<T>, k: usize) -> Result<Vec<RetrievalHit>>
where
    S: EmbeddingSource + ?Sized,
    T: Scalar,
{
    let q = prepare(source, query, k)?;
    let mut all: Vec<RetrievalHit> = (0..source.len())
        .map(|i| {
            let row = source.row(i);
            let mut score = 0.0f64;
            for d in 0..row.len() {
                score += row[d] as f64 * q[d];
            }
            RetrievalHit { word: source.word(i).to_owned(), score, bank_index: i }
        })
        .collect();
    all.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("finite scores")
            .then_with(|| a.word.cmp(&b.word))
            .then_with(|| a.bank_index.cmp(&b.bank_index))
    });
    all.truncate(k);
    Ok(all)
}

/// One retrieval per query, in query order. The first failing query (by
/// index) is reported.
pub fn batch_retrieve<S, T>(source: &S, queries: &[EmbeddingVector<T>], k: usize) -> Result<Vec<Vec<RetrievalHit>>>
where
    S: EmbeddingSource + Sync + ?Sized,
    T: Scalar,
{
    let results: Vec<Result<Vec<RetrievalHit>>> = queries.par_iter().map(|q| retrieve_top_k(source, q, k)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::AtQuery { index, source: Box::new(e) }))
        .collect()
}
