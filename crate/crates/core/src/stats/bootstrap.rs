//! Paired bootstrap resampling over sentence-level sufficient statistics.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::bleu::{bleu_sentence_stats, BleuStats};
use crate::metrics::ter::ter_sentence_stats;
use crate::metrics::TokenizerConfig;
use crate::seed;

pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMetric {
    #[default]
    Bleu,
    /// Lower is better.
    Ter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub metric: BootstrapMetric,
    pub n_samples: usize,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// `1 - wins_winner / n_samples`; ties count for neither system.
    pub p_value: f64,
    /// System with more wins, `None` on a draw.
    pub winner: Option<Winner>,
    pub seed: u64,
}

impl BootstrapResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.winner.is_some() && self.p_value < alpha
    }
}

/// Per-sentence statistics that can be summed and compared as a corpus score.
trait Resample: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(&mut self, other: &Self);
    /// `Greater` when `self` is the better corpus.
    fn compare(&self, other: &Self) -> Ordering;
}

impl Resample for BleuStats {
    fn zero() -> Self {
        BleuStats::default()
    }

    fn add(&mut self, other: &Self) {
        *self += *other;
    }

    fn compare(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.score().score.total_cmp(&other.score().score)
    }
}

#[derive(Debug, Clone, Copy)]
struct TerTotals {
    edits: u64,
    ref_len: u64,
}

impl Resample for TerTotals {
    fn zero() -> Self {
        TerTotals { edits: 0, ref_len: 0 }
    }

    fn add(&mut self, other: &Self) {
        self.edits += other.edits;
        self.ref_len += other.ref_len;
    }

    fn compare(&self, other: &Self) -> Ordering {
        if self.ref_len == 0 || other.ref_len == 0 {
            return Ordering::Equal;
        }
        // Fewer edits per reference word wins.
        let lhs = self.edits as u128 * other.ref_len as u128;
        let rhs = other.edits as u128 * self.ref_len as u128;
        rhs.cmp(&lhs)
    }
}

fn resample<T: Resample>(a: &[T], b: &[T], n_samples: usize, base: u64) -> (usize, usize, usize) {
    let n = a.len();
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::derive(base, &[i as u64]));
            let (mut sa, mut sb) = (T::zero(), T::zero());
            for _ in 0..n {
                let k = rng.random_range(0..n);
                sa.add(&a[k]);
                sb.add(&b[k]);
            }
            match sa.compare(&sb) {
                Ordering::Greater => (1, 0, 0),
                Ordering::Less => (0, 1, 0),
                Ordering::Equal => (0, 0, 1),
            }
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2))
}

/// Paired bootstrap test of system A against system B on corpus BLEU.
pub fn bootstrap_significance<S: AsRef<str> + Sync>(
    hyps_a: &[S],
    hyps_b: &[S],
    refs: &[S],
    n_samples: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    bootstrap_with(BootstrapMetric::Bleu, &TokenizerConfig::BLEU, hyps_a, hyps_b, refs, n_samples, seed)
}

/// Paired bootstrap on the chosen metric.
pub fn bootstrap_with<S: AsRef<str> + Sync>(
    metric: BootstrapMetric,
    tok: &TokenizerConfig,
    hyps_a: &[S],
    hyps_b: &[S],
    refs: &[S],
    n_samples: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    if hyps_b.len() != hyps_a.len() {
        return Err(Error::LengthMismatch {
            expected: hyps_a.len(),
            actual: hyps_b.len(),
        });
    }
    if n_samples == 0 {
        return Err(Error::Config("bootstrap needs at least one sample".into()));
    }
    if refs.is_empty() {
        return Err(Error::Empty("reference list"));
    }
    let (wins_a, wins_b, ties) = match metric {
        BootstrapMetric::Bleu => {
            let a = bleu_sentence_stats(hyps_a, refs, tok)?;
            let b = bleu_sentence_stats(hyps_b, refs, tok)?;
            resample(&a, &b, n_samples, seed)
        }
        BootstrapMetric::Ter => {
            let totals = |hyps: &[S]| -> Result<Vec<TerTotals>> {
                Ok(ter_sentence_stats(hyps, refs, tok)?
                    .into_iter()
                    .map(|(e, ref_len)| TerTotals {
                        edits: e.total(),
                        ref_len,
                    })
                    .collect())
            };
            resample(&totals(hyps_a)?, &totals(hyps_b)?, n_samples, seed)
        }
    };
    let winner = match wins_a.cmp(&wins_b) {
        Ordering::Greater => Some(Winner::A),
        Ordering::Less => Some(Winner::B),
        Ordering::Equal => None,
    };
    let p_value = 1.0 - wins_a.max(wins_b) as f64 / n_samples as f64;
    Ok(BootstrapResult {
        metric,
        n_samples,
        wins_a,
        wins_b,
        ties,
        p_value,
        winner,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refs() -> Vec<String> {
        (0..20).map(|i| format!("the cat number {i} sat on the mat")).collect()
    }

    #[test]
    fn identical_systems_tie_everywhere() {
        let r = refs();
        let h: Vec<String> = r.iter().map(|s| s.replace("cat", "dog")).collect();
        let res = bootstrap_significance(&h, &h, &r, DEFAULT_SAMPLES, 3).unwrap();
        assert_eq!(res.ties, DEFAULT_SAMPLES);
        assert_eq!(res.p_value, 1.0);
        assert!(!res.significant(0.999));
    }

    #[test]
    fn dominant_system_wins_every_sample() {
        let r = refs();
        let empty = vec![String::new(); r.len()];
        let res = bootstrap_significance(&r, &empty, &r, DEFAULT_SAMPLES, 11).unwrap();
        assert_eq!(res.wins_a, DEFAULT_SAMPLES);
        assert_eq!(res.p_value, 0.0);
        assert_eq!(res.winner, Some(Winner::A));
        let ter = bootstrap_with(BootstrapMetric::Ter, &TokenizerConfig::TER_NORMALIZED, &r, &empty, &r, 200, 11)
            .unwrap();
        assert_eq!(ter.wins_a, 200);
    }

    #[test]
    fn deterministic_per_seed() {
        let r = refs();
        let a: Vec<String> = r.iter().enumerate().map(|(i, s)| if i % 3 == 0 { s.replace("mat", "rug") } else { s.clone() }).collect();
        let b: Vec<String> = r.iter().enumerate().map(|(i, s)| if i % 2 == 0 { s.replace("sat", "lay") } else { s.clone() }).collect();
        let x = bootstrap_significance(&a, &b, &r, 300, 5).unwrap();
        let y = bootstrap_significance(&a, &b, &r, 300, 5).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.wins_a + x.wins_b + x.ties, 300);
        assert!((0.0..=1.0).contains(&x.p_value));
    }

    #[test]
    fn rejects_bad_input() {
        let r = refs();
        assert!(matches!(
            bootstrap_significance(&r[..3], &r[..2], &r[..3], 10, 0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(bootstrap_significance(&r, &r, &r, 0, 0).is_err());
    }
}
