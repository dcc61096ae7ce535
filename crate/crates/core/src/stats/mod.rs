//! Significance testing, inter-annotator agreement and adequacy aggregation.

pub mod adequacy;
pub mod bootstrap;
pub mod kappa;

pub use adequacy::{adequacy_summary, AdequacySummary, AdequacyTable, Score, System};
pub use bootstrap::{bootstrap_significance, bootstrap_with, BootstrapMetric, BootstrapResult, Winner, DEFAULT_SAMPLES};
pub use kappa::{cohen_kappa, pairwise_average_kappa, weighted_kappa, KappaResult, PairwiseAgreement, Weighting};

/// Rating scale of adequacy judgements.
pub const ADEQUACY_SCALE: (i64, i64) = (1, 5);
