//! Character n-gram F-score (chrF).
//!
//! Whitespace is removed before n-grams are extracted, so n-grams may span word
//! boundaries. Per-order counts are summed over the corpus; precision and recall
//! are averaged over the orders that have both hypothesis and reference n-grams,
//! then combined as `(1 + b^2) P R / (b^2 P + R)`.

use std::collections::HashMap;
use std::ops::AddAssign;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bleu::check_aligned;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

/// Per-order `(hyp n-grams, ref n-grams, matched n-grams)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChrfStats {
    pub orders: Vec<[u64; 3]>,
}

impl ChrfStats {
    pub fn zero(max_n: usize) -> Self {
        ChrfStats {
            orders: vec![[0; 3]; max_n],
        }
    }

    pub fn from_text(hyp: &str, reference: &str, max_n: usize) -> Self {
        let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
        let orders = (1..=max_n)
            .map(|n| {
                let hc = char_ngrams(&h, n);
                let rc = char_ngrams(&r, n);
                let matched = hc
                    .iter()
                    .map(|(g, &c)| c.min(rc.get(g).copied().unwrap_or(0)))
                    .sum();
                [hc.values().sum(), rc.values().sum(), matched]
            })
            .collect();
        ChrfStats { orders }
    }

    /// Score in `[0, 100]`. Two empty sides count as a perfect match.
    pub fn score(&self, beta: f64) -> f64 {
        let (hyp_total, ref_total) = self
            .orders
            .iter()
            .fold((0, 0), |(h, r), o| (h + o[0], r + o[1]));
        if hyp_total == 0 && ref_total == 0 {
            return 100.0;
        }
        let mut precision = 0.0;
        let mut recall = 0.0;
        let mut effective = 0usize;
        for &[h, r, m] in &self.orders {
            if h > 0 && r > 0 {
                precision += m as f64 / h as f64;
                recall += m as f64 / r as f64;
                effective += 1;
            }
        }
        if effective == 0 {
            return 0.0;
        }
        precision /= effective as f64;
        recall /= effective as f64;
        let b2 = beta * beta;
        let denom = b2 * precision + recall;
        if denom <= 0.0 {
            return 0.0;
        }
        100.0 * (1.0 + b2) * precision * recall / denom
    }
}

impl AddAssign<&ChrfStats> for ChrfStats {
    fn add_assign(&mut self, o: &ChrfStats) {
        for (a, b) in self.orders.iter_mut().zip(&o.orders) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
    }
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    for w in chars.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

/// Corpus chrF over aligned lists.
pub fn chrf<S: AsRef<str> + Sync>(hyps: &[S], refs: &[S], max_n: usize, beta: f64) -> Result<f64> {
    check_aligned(hyps.len(), refs.len())?;
    if max_n == 0 {
        return Err(Error::Config("chrF order must be at least 1".into()));
    }
    if !(beta > 0.0) {
        return Err(Error::Config(format!("chrF beta must be positive, got {beta}")));
    }
    let total = hyps
        .par_iter()
        .zip(refs.par_iter())
        .map(|(h, r)| ChrfStats::from_text(h.as_ref(), r.as_ref(), max_n))
        .collect::<Vec<_>>()
        .iter()
        .fold(ChrfStats::zero(max_n), |mut acc, s| {
            acc += s;
            acc
        });
    Ok(total.score(beta))
}

/// chrF with the canonical order 6 and beta 2.
pub fn chrf_default<S: AsRef<str> + Sync>(hyps: &[S], refs: &[S]) -> Result<f64> {
    chrf(hyps, refs, DEFAULT_MAX_ORDER, DEFAULT_BETA)
}
