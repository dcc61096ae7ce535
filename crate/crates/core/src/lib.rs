//! Corpus engineering and evaluation for automatic post-editing (APE).
//!
//! The crate covers the full life cycle of a post-editing triplet corpus:
//!
//! * [`triplet`]: the `(src, mt, pe)` data model, JSONL/TSV I/O and corpus statistics.
//! * [`filter`]: length-ratio filtering, punctuation normalization, deduplication,
//!   language identification and seeded holdout splits.
//! * [`transform`]: change-tracked subtitle cleanup and its exact inverse.
//! * [`metrics`]: corpus BLEU, chrF and TER with shifts, plus an exhaustive TER oracle.
//! * [`stats`]: paired bootstrap resampling, Cohen's kappa (plain and quadratically
//!   weighted) and adequacy aggregation.
//! * [`analysis`]: data-size ablation sampling, upsampled corpus mixing and
//!   TER-bucketed delta analysis.
//!
//! Every randomized routine takes an explicit seed; nothing reads ambient entropy.

pub mod analysis;
pub mod error;
pub mod filter;
pub mod metrics;
pub mod seed;
pub mod stats;
pub mod transform;
pub mod triplet;

pub use error::{Error, Result};
pub use triplet::{Corpus, CorpusStats, Field, Format, Triplet};
