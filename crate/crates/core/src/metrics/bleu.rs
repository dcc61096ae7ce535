//! Corpus BLEU with clipped n-gram precision (n = 1..4) and a brevity penalty.

use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, TokenizerConfig};
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Sufficient statistics of one or more sentence pairs. Sums of these are exact,
/// so corpus scores do not depend on aggregation order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, o: BleuStats) -> BleuStats {
        self += o;
        self
    }
}

impl AddAssign for BleuStats {
    fn add_assign(&mut self, o: BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
    }
}

impl std::iter::Sum for BleuStats {
    fn sum<I: Iterator<Item = BleuStats>>(iter: I) -> Self {
        iter.fold(BleuStats::default(), Add::add)
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

impl BleuStats {
    pub fn from_tokens(hyp: &[String], reference: &[String]) -> Self {
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp_counts = ngram_counts(hyp, n);
            let ref_counts = ngram_counts(reference, n);
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn from_text(hyp: &str, reference: &str, tok: &TokenizerConfig) -> Self {
        Self::from_tokens(&tokenize(hyp, tok), &tokenize(reference, tok))
    }

    pub fn brevity_penalty(&self) -> f64 {
        if self.hyp_len == 0 {
            0.0
        } else if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        }
    }

    pub fn precisions(&self) -> [f64; MAX_ORDER] {
        std::array::from_fn(|n| {
            if self.totals[n] == 0 {
                0.0
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            }
        })
    }

    /// Unsmoothed corpus score.
    pub fn score(&self) -> BleuScore {
        let precisions = self.precisions();
        let brevity_penalty = self.brevity_penalty();
        let score = if precisions.iter().all(|&p| p > 0.0) {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            100.0 * brevity_penalty * log_mean.exp()
        } else {
            0.0
        };
        BleuScore {
            score,
            precisions,
            brevity_penalty,
            hyp_len: self.hyp_len,
            ref_len: self.ref_len,
        }
    }

    /// Sentence-level score with add-one smoothing for n >= 2.
    pub fn smoothed_score(&self) -> f64 {
        if self.totals[0] == 0 || self.matches[0] == 0 {
            return 0.0;
        }
        let mut log_sum = (self.matches[0] as f64 / self.totals[0] as f64).ln();
        for n in 1..MAX_ORDER {
            log_sum += ((self.matches[n] + 1) as f64 / (self.totals[n] + 1) as f64).ln();
        }
        100.0 * self.brevity_penalty() * (log_sum / MAX_ORDER as f64).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    /// In `[0, 100]`.
    pub score: f64,
    /// Modified n-gram precisions as fractions, n = 1..4.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
}

pub(crate) fn check_aligned(hyps: usize, refs: usize) -> Result<()> {
    if hyps != refs {
        return Err(Error::LengthMismatch {
            expected: refs,
            actual: hyps,
        });
    }
    Ok(())
}

/// Per-sentence statistics, in input order.
pub fn bleu_sentence_stats<S: AsRef<str> + Sync>(
    hyps: &[S],
    refs: &[S],
    tok: &TokenizerConfig,
) -> Result<Vec<BleuStats>> {
    check_aligned(hyps.len(), refs.len())?;
    Ok(hyps
        .par_iter()
        .zip(refs.par_iter())
        .map(|(h, r)| BleuStats::from_text(h.as_ref(), r.as_ref(), tok))
        .collect())
}

/// Corpus BLEU over aligned hypothesis and reference lists.
pub fn bleu_corpus<S: AsRef<str> + Sync>(hyps: &[S], refs: &[S], tok: &TokenizerConfig) -> Result<BleuScore> {
    if refs.is_empty() {
        return Err(Error::Empty("reference list"));
    }
    let stats: BleuStats = bleu_sentence_stats(hyps, refs, tok)?.into_iter().sum();
    Ok(stats.score())
}
