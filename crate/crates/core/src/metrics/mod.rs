//! Corpus-level BLEU, chrF and TER.

pub mod bleu;
pub mod chrf;
pub mod ter;
pub mod tokenize;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use bleu::{bleu_corpus, BleuScore, BleuStats};
pub use chrf::{chrf, chrf_default};
pub use ter::{ter_corpus, ter_oracle, ter_sentence, EditOp, EditScript, Shift, TerEdits, TerScore};
pub use tokenize::{tokenize, Scheme, TokenizerConfig};

/// Tokenization choices for a full evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub bleu_tokenizer: TokenizerConfig,
    pub ter_tokenizer: TokenizerConfig,
    pub chrf_order: usize,
    pub chrf_beta: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            bleu_tokenizer: TokenizerConfig::BLEU,
            ter_tokenizer: TokenizerConfig::TER_NORMALIZED,
            chrf_order: chrf::DEFAULT_MAX_ORDER,
            chrf_beta: chrf::DEFAULT_BETA,
        }
    }
}

/// Scores of one sentence pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScores {
    /// Add-one smoothed sentence BLEU.
    pub bleu: f64,
    pub chrf: f64,
    pub ter_edits: u64,
    pub ter_ref_len: u64,
}

/// All three metrics for one system, full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu: BleuScore,
    pub chrf: f64,
    pub ter: TerScore,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_sentence: Option<Vec<SentenceScores>>,
}

/// Scores a system against references with every metric.
pub fn evaluate<S: AsRef<str> + Sync>(
    hyps: &[S],
    refs: &[S],
    options: &EvalOptions,
    per_sentence: bool,
) -> Result<MetricReport> {
    let bleu_stats = bleu::bleu_sentence_stats(hyps, refs, &options.bleu_tokenizer)?;
    let bleu = bleu_stats.iter().copied().sum::<BleuStats>().score();
    let chrf = chrf::chrf(hyps, refs, options.chrf_order, options.chrf_beta)?;
    let ter_stats = ter::ter_sentence_stats(hyps, refs, &options.ter_tokenizer)?;
    let ter = ter::ter_from_stats(&ter_stats)?;
    let per_sentence = per_sentence.then(|| {
        hyps.iter()
            .zip(refs)
            .zip(bleu_stats.iter().zip(&ter_stats))
            .map(|((h, r), (b, (e, l)))| SentenceScores {
                bleu: b.smoothed_score(),
                chrf: chrf::ChrfStats::from_text(h.as_ref(), r.as_ref(), options.chrf_order)
                    .score(options.chrf_beta),
                ter_edits: e.total(),
                ter_ref_len: *l,
            })
            .collect()
    });
    Ok(MetricReport {
        bleu,
        chrf,
        ter,
        per_sentence,
    })
}

/// Rounds for display, two decimals as in published tables.
pub fn display2(x: f64) -> String {
    format!("{x:.2}")
}
