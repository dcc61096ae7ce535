//! Triplet corpus filtering.
//!
//! The pipeline runs a fixed sequence of stages:
//!
//! 1. **ratio**: compute the corpus-global character ratio `r_c` and drop triplets
//!    whose `src`/`pe` character ratio falls outside `[(1 - t) r_c, (1 + t) r_c]`.
//! 2. **normalize**: punctuation normalization of all three fields.
//! 3. **dedup**: among triplets sharing `(src, mt)` keep the one with the longest `pe`.
//! 4. **langid**: keep triplets whose `src` and `pe` are identified as the expected
//!    source and target languages.
//! 5. **split**: seeded holdout of dev and test sets.
//!
//! Every stage returns a [`Partition`], so each input triplet is accounted for
//! exactly once and the [`FilterReport`] counts reconcile.

mod langid;
mod punct;

use std::collections::HashMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::triplet::{char_len, Corpus, Field, Triplet};

pub use langid::{ConstantClassifier, LanguageClassifier, LookupClassifier, NgramClassifier};
pub use punct::normalize_punctuation;

/// Stage names in execution order, as recorded in the report.
pub const STAGE_ORDER: [&str; 5] = ["ratio", "normalize", "dedup", "langid", "split"];

pub const DEFAULT_TOLERANCE: f64 = 0.2;
pub const DEFAULT_HOLDOUT_SIZE: usize = 10_000;

/// Where the pipeline gets its language classifier from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LanguageIdSource {
    /// Embedded character n-gram model.
    #[default]
    Builtin,
    /// `text<TAB>lang` lines produced by an external tool.
    External { path: PathBuf },
    /// Accept everything.
    Off,
}

fn default_t() -> f64 {
    DEFAULT_TOLERANCE
}
fn default_numerator() -> Field {
    Field::Src
}
fn default_denominator() -> Field {
    Field::Pe
}
fn default_holdout() -> usize {
    DEFAULT_HOLDOUT_SIZE
}
fn default_src_lang() -> String {
    "en".into()
}
fn default_tgt_lang() -> String {
    "de".into()
}

/// Pipeline configuration; every field has a default so `{}` is a valid document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    #[serde(default = "default_t")]
    pub t: f64,
    /// Field whose character total is the numerator of `r_c`.
    #[serde(default = "default_numerator")]
    pub ratio_numerator: Field,
    /// Field whose character total is the denominator of `r_c`.
    #[serde(default = "default_denominator")]
    pub ratio_denominator: Field,
    #[serde(default = "default_holdout")]
    pub dev_size: usize,
    #[serde(default = "default_holdout")]
    pub test_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_src_lang")]
    pub expected_src_lang: String,
    #[serde(default = "default_tgt_lang")]
    pub expected_tgt_lang: String,
    #[serde(default)]
    pub language_id: LanguageIdSource,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            t: DEFAULT_TOLERANCE,
            ratio_numerator: Field::Src,
            ratio_denominator: Field::Pe,
            dev_size: DEFAULT_HOLDOUT_SIZE,
            test_size: DEFAULT_HOLDOUT_SIZE,
            seed: 0,
            expected_src_lang: default_src_lang(),
            expected_tgt_lang: default_tgt_lang(),
            language_id: LanguageIdSource::Builtin,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t < 1.0) {
            return Err(Error::Config(format!("t must lie in (0, 1), got {}", self.t)));
        }
        if self.expected_src_lang.is_empty() || self.expected_tgt_lang.is_empty() {
            return Err(Error::Config("expected languages must be non-empty".into()));
        }
        Ok(())
    }

    /// Builds the classifier named by [`FilterConfig::language_id`].
    pub fn classifier(&self) -> Result<Box<dyn LanguageClassifier>> {
        Ok(match &self.language_id {
            LanguageIdSource::Builtin => Box::new(NgramClassifier::builtin()),
            LanguageIdSource::External { path } => Box::new(LookupClassifier::from_file(path)?),
            // The pipeline skips the stage; this classifier only answers direct calls.
            LanguageIdSource::Off => Box::new(|_: &str| None::<String>) as Box<dyn LanguageClassifier>,
        })
    }
}

/// Why a triplet left the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    /// Character ratio outside the tolerance band.
    Ratio,
    /// `pe` is empty after trimming, so no ratio exists.
    Degenerate,
    Duplicate,
    /// A field was identified as the wrong language.
    Language,
    /// The classifier could not decide.
    LanguageUndetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removed {
    pub triplet: Triplet,
    pub reason: RemovalReason,
}

/// Result of one stage: kept and removed triplets, each in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partition {
    pub kept: Corpus,
    pub removed: Vec<Removed>,
}

impl Partition {
    fn from_verdicts(corpus: &Corpus, verdicts: Vec<Option<RemovalReason>>) -> Self {
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        for (t, v) in corpus.iter().zip(verdicts) {
            match v {
                None => kept.push(t.clone()),
                Some(reason) => removed.push(Removed {
                    triplet: t.clone(),
                    reason,
                }),
            }
        }
        Partition {
            kept: corpus.with_triplets(kept),
            removed,
        }
    }

    pub fn removed_corpus(&self) -> Corpus {
        self.kept
            .with_triplets(self.removed.iter().map(|r| r.triplet.clone()).collect())
    }
}

/// Corpus-global character ratio between two fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalRatio {
    pub r_c: f64,
    pub numerator_chars: u64,
    pub denominator_chars: u64,
}

impl GlobalRatio {
    pub fn from_totals(numerator_chars: u64, denominator_chars: u64) -> Result<Self> {
        if denominator_chars == 0 {
            return Err(Error::ZeroDenominator("global character ratio"));
        }
        Ok(GlobalRatio {
            r_c: numerator_chars as f64 / denominator_chars as f64,
            numerator_chars,
            denominator_chars,
        })
    }
}

/// Ratio of the total (trimmed) characters of `num` over those of `den`.
pub fn compute_global_ratio(corpus: &Corpus, num: Field, den: Field) -> Result<GlobalRatio> {
    if corpus.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let (n, d) = corpus.iter().fold((0u64, 0u64), |(n, d), t| {
        (n + char_len(t.field(num)) as u64, d + char_len(t.field(den)) as u64)
    });
    GlobalRatio::from_totals(n, d)
}

/// Keeps a triplet iff `(1 - t) r_c <= chars(src) / chars(pe) <= (1 + t) r_c`.
///
/// The comparison is done on cross-multiplied totals so boundary cases are not
/// at the mercy of an extra division.
pub fn ratio_filter(corpus: &Corpus, ratio: &GlobalRatio, t: f64) -> Result<Partition> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Config(format!("t must lie in (0, 1), got {t}")));
    }
    let num = ratio.numerator_chars as f64;
    let den = ratio.denominator_chars as f64;
    let verdicts = corpus
        .triplets
        .par_iter()
        .map(|tr| {
            let pe = char_len(&tr.pe) as f64;
            if pe == 0.0 {
                return Some(RemovalReason::Degenerate);
            }
            let src_scaled = char_len(&tr.src) as f64 * den;
            let lower = (1.0 - t) * num * pe;
            let upper = (1.0 + t) * num * pe;
            (src_scaled < lower || src_scaled > upper).then_some(RemovalReason::Ratio)
        })
        .collect();
    Ok(Partition::from_verdicts(corpus, verdicts))
}

/// Punctuation-normalizes all three fields.
pub fn normalize_corpus(corpus: &Corpus) -> Corpus {
    let triplets = corpus
        .triplets
        .par_iter()
        .map(|t| Triplet {
            src: normalize_punctuation(&t.src),
            mt: normalize_punctuation(&t.mt),
            pe: normalize_punctuation(&t.pe),
            ..t.clone()
        })
        .collect();
    corpus.with_triplets(triplets)
}

/// Collapses triplets sharing `(src, mt)` to the one with the longest `pe`.
///
/// Ties go to the earliest occurrence; survivors keep their original order.
pub fn dedup(corpus: &Corpus) -> Partition {
    let mut best: HashMap<(&str, &str), (usize, usize)> = HashMap::new();
    for (i, t) in corpus.iter().enumerate() {
        let len = char_len(&t.pe);
        best.entry((t.src.as_str(), t.mt.as_str()))
            .and_modify(|slot| {
                if len > slot.1 {
                    *slot = (i, len);
                }
            })
            .or_insert((i, len));
    }
    let verdicts = corpus
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (winner, _) = best[&(t.src.as_str(), t.mt.as_str())];
            (winner != i).then_some(RemovalReason::Duplicate)
        })
        .collect();
    Partition::from_verdicts(corpus, verdicts)
}

/// Keeps triplets whose `src` is `src_lang` and whose `pe` is `tgt_lang`.
pub fn language_filter(
    corpus: &Corpus,
    classifier: &dyn LanguageClassifier,
    src_lang: &str,
    tgt_lang: &str,
) -> Partition {
    let verdicts = corpus
        .triplets
        .par_iter()
        .map(|t| {
            let src = classifier.identify(&t.src);
            let pe = classifier.identify(&t.pe);
            match (src, pe) {
                (Some(s), Some(p)) if s == src_lang && p == tgt_lang => None,
                (Some(_), Some(_)) => Some(RemovalReason::Language),
                _ => Some(RemovalReason::LanguageUndetermined),
            }
        })
        .collect();
    Partition::from_verdicts(corpus, verdicts)
}

/// Train, dev and test portions of a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl Split {
    pub fn sizes(&self) -> SplitSizes {
        SplitSizes {
            train: self.train.len(),
            dev: self.dev.len(),
            test: self.test.len(),
        }
    }
}

/// Seeded holdout: a uniform shuffle assigns the first `dev_size` triplets to dev
/// and the next `test_size` to test. Train keeps the original relative order.
pub fn split_holdout(corpus: &Corpus, dev_size: usize, test_size: usize, seed: u64) -> Result<Split> {
    let holdout = dev_size + test_size;
    if holdout > 0 && holdout >= corpus.len() {
        return Err(Error::SizeTooLarge {
            requested: holdout,
            available: corpus.len().saturating_sub(1),
        });
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut seed::rng(seed::derive(seed, &[0x5917])));
    let pick = |idx: &[usize]| corpus.with_triplets(idx.iter().map(|&i| corpus.triplets[i].clone()).collect());
    let dev = pick(&order[..dev_size]);
    let test = pick(&order[dev_size..holdout]);
    let mut rest = order[holdout..].to_vec();
    rest.sort_unstable();
    Ok(Split {
        train: pick(&rest),
        dev,
        test,
    })
}

/// Audit trail of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_count: usize,
    pub removed_by_ratio: usize,
    pub removed_by_dedup: usize,
    pub removed_by_langid: usize,
    pub kept_count: usize,
    pub r_c: GlobalRatio,
    pub split_sizes: SplitSizes,
    /// Subset of `removed_by_ratio` with an empty `pe`.
    pub degenerate: usize,
    /// Subset of `removed_by_langid` the classifier could not decide on.
    pub langid_undetermined: usize,
    pub t: f64,
    pub seed: u64,
    pub stage_order: Vec<String>,
}

impl FilterReport {
    /// True when every input triplet is accounted for exactly once.
    pub fn reconciles(&self) -> bool {
        let split = self.split_sizes.train + self.split_sizes.dev + self.split_sizes.test;
        self.input_count
            == self.kept_count + self.removed_by_ratio + self.removed_by_dedup + self.removed_by_langid
            && self.kept_count == split
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub split: Split,
    pub report: FilterReport,
    pub removed: Vec<Removed>,
}

/// Runs ratio → normalize → dedup → langid → split.
pub fn run_filter_pipeline(
    corpus: &Corpus,
    config: &FilterConfig,
    classifier: &dyn LanguageClassifier,
) -> Result<FilterOutcome> {
    config.validate()?;
    let r_c = compute_global_ratio(corpus, config.ratio_numerator, config.ratio_denominator)?;

    let by_ratio = ratio_filter(corpus, &r_c, config.t)?;
    let normalized = normalize_corpus(&by_ratio.kept);
    let by_dedup = dedup(&normalized);
    let by_lang = match config.language_id {
        LanguageIdSource::Off => Partition::from_verdicts(&by_dedup.kept, vec![None; by_dedup.kept.len()]),
        _ => language_filter(
            &by_dedup.kept,
            classifier,
            &config.expected_src_lang,
            &config.expected_tgt_lang,
        ),
    };
    let split = split_holdout(&by_lang.kept, config.dev_size, config.test_size, config.seed)?;

    let count = |p: &Partition, reason: RemovalReason| p.removed.iter().filter(|r| r.reason == reason).count();
    let report = FilterReport {
        input_count: corpus.len(),
        removed_by_ratio: by_ratio.removed.len(),
        removed_by_dedup: by_dedup.removed.len(),
        removed_by_langid: by_lang.removed.len(),
        kept_count: by_lang.kept.len(),
        r_c,
        split_sizes: split.sizes(),
        degenerate: count(&by_ratio, RemovalReason::Degenerate),
        langid_undetermined: count(&by_lang, RemovalReason::LanguageUndetermined),
        t: config.t,
        seed: config.seed,
        stage_order: STAGE_ORDER.iter().map(|s| s.to_string()).collect(),
    };
    debug_assert!(report.reconciles());

    let mut removed = by_ratio.removed;
    removed.extend(by_dedup.removed);
    removed.extend(by_lang.removed);
    Ok(FilterOutcome { split, report, removed })
}
