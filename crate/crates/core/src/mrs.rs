//! Multi-read screening.
//!
//! Given `v` noisy reads of one strand of nominal length `k`, every read is
//! scored by how well each of its bases agrees with the other reads at the
//! same position, and the `w` best-scoring reads are kept.
//!
//! Scoring views the reads as a `v x k` character matrix (read `i` occupies
//! row `i`; positions at or past `k` are ignored). For each cell that holds a
//! base, the score is the number of reads that carry the same base in that
//! column, itself included. A cell past the end of its read scores `-v`. A
//! read's score is its row mean, kept as an exact rational so that ties are
//! detected exactly.
//!
//! When the `w`-th and `(w+1)`-th ranked scores are equal, every read sharing
//! that score is rescored the same way over a `v x (k-K+1)` matrix of
//! stride-1 `K`-mers, and the tied block is reordered by the new score.
//! Residual ties fall back to ascending read index.

use num_rational::Ratio;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ReadSet;
use crate::dna::{to_decoder_symbols, Base};
use crate::error::{Error, Result};

/// Exact read score.
pub type Score = Ratio<i64>;

/// Default `K` for k-mer rescoring.
pub const DEFAULT_KMER: usize = 7;

/// Row-major `v x k` positional score matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreMatrix {
    v: usize,
    k: usize,
    entries: Vec<i64>,
}

impl ScoreMatrix {
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, read: usize, pos: usize) -> i64 {
        self.entries[read * self.k + pos]
    }

    pub fn row(&self, read: usize) -> &[i64] {
        &self.entries[read * self.k..(read + 1) * self.k]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreeningResult {
    /// Selected read indices (0-based), best first.
    pub selected: Vec<usize>,
    /// Positional score of every read; empty for random selection.
    pub scores: Vec<Score>,
    pub tie_broken: bool,
    /// `(read index, k-mer score)` for each rescored read.
    pub kmer_scores: Option<Vec<(usize, Score)>>,
}

impl ScreeningResult {
    pub fn is_selected(&self, read: usize) -> bool {
        self.selected.contains(&read)
    }
}

pub fn positional_scores(reads: &ReadSet, k: usize) -> (ScoreMatrix, Vec<Score>) {
    assert!(k >= 1, "strand length must be positive");
    let v = reads.v();
    let penalty = -(v as i64);
    let mut entries = vec![penalty; v * k];
    for j in 0..k {
        let mut counts = [0i64; 4];
        for r in &reads.reads {
            if let Some(&b) = r.get(j) {
                counts[b as usize] += 1;
            }
        }
        for (i, r) in reads.reads.iter().enumerate() {
            if let Some(&b) = r.get(j) {
                entries[i * k + j] = counts[b as usize];
            }
        }
    }
    let q = entries
        .chunks(k)
        .map(|row| Score::new(row.iter().sum(), k as i64))
        .collect();
    (ScoreMatrix { v, k, entries }, q)
}

/// Stride-1 substrings of length `kmer`.
pub fn kmerize(seq: &[Base], kmer: usize) -> Vec<&[Base]> {
    assert!(kmer >= 1, "k-mer length must be positive");
    seq.windows(kmer).collect()
}

/// Rescore the `tied` reads over k-mer columns built from all reads, each
/// read truncated to `k`. Returned scores follow the order of `tied`.
pub fn kmer_rescore(reads: &ReadSet, tied: &[usize], kmer: usize, k: usize) -> Result<Vec<Score>> {
    assert!(kmer >= 1, "k-mer length must be positive");
    if kmer >= k {
        return Err(Error::KmerTooLong { kmer, k });
    }
    let v = reads.v() as i64;
    let columns = k - kmer + 1;
    let truncated: Vec<&[Base]> = reads
        .reads
        .iter()
        .map(|r| &r[..r.len().min(k)])
        .collect();
    let scores = tied
        .iter()
        .map(|&i| {
            let mine = kmerize(truncated[i], kmer);
            let total: i64 = (0..columns)
                .map(|j| match mine.get(j) {
                    Some(&target) => truncated
                        .iter()
                        .filter(|r| r.get(j..j + kmer) == Some(target))
                        .count() as i64,
                    None => -v,
                })
                .sum();
            Score::new(total, columns as i64)
        })
        .collect();
    Ok(scores)
}

fn check_selection(w: usize, v: usize) -> Result<()> {
    if w == 0 {
        return Err(Error::EmptySelection);
    }
    if w > v {
        return Err(Error::SelectionTooLarge { w, v });
    }
    Ok(())
}

/// Select the `w` most reliable reads, with k-mer rescoring at a tied
/// selection boundary. The strand length is `reads.source_length`.
pub fn select(reads: &ReadSet, w: usize, kmer: usize) -> Result<ScreeningResult> {
    let v = reads.v();
    check_selection(w, v)?;
    let k = reads.source_length;
    let (_, q) = positional_scores(reads, k);

    let mut order: Vec<usize> = (0..v).collect();
    order.sort_by(|&a, &b| q[b].cmp(&q[a]).then(a.cmp(&b)));

    let mut tie_broken = false;
    let mut kmer_scores = None;
    if w < v && q[order[w - 1]] == q[order[w]] {
        let boundary = q[order[w - 1]];
        let tied: Vec<usize> = (0..v).filter(|&i| q[i] == boundary).collect();
        let rescored = kmer_rescore(reads, &tied, kmer, k)?;
        let start = order.iter().position(|&i| q[i] == boundary).unwrap();
        let block = &mut order[start..start + tied.len()];
        let lookup = |i: usize| rescored[tied.binary_search(&i).unwrap()];
        block.sort_by(|&a, &b| lookup(b).cmp(&lookup(a)).then(a.cmp(&b)));
        tie_broken = true;
        kmer_scores = Some(tied.into_iter().zip(rescored).collect());
    }
    order.truncate(w);
    Ok(ScreeningResult {
        selected: order,
        scores: q,
        tie_broken,
        kmer_scores,
    })
}

/// Uniformly sample `w` distinct reads; indices are returned ascending.
pub fn select_random(reads: &ReadSet, w: usize, seed: u64) -> Result<ScreeningResult> {
    let v = reads.v();
    check_selection(w, v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = index::sample(&mut rng, v, w).into_vec();
    selected.sort_unstable();
    Ok(ScreeningResult {
        selected,
        scores: Vec::new(),
        tie_broken: false,
        kmer_scores: None,
    })
}

/// `w x k` decoder rows for the selected reads.
pub fn to_decoder_input(result: &ScreeningResult, reads: &ReadSet, k: usize) -> Vec<Vec<u8>> {
    result
        .selected
        .iter()
        .map(|&i| to_decoder_symbols(&reads.reads[i], k))
        .collect()
}
