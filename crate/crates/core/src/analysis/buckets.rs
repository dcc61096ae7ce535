//! Delta-TER per bucket of baseline sentence TER.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ter::ter_sentence_stats;
use crate::metrics::TokenizerConfig;

pub const BUCKETS: usize = 10;

/// Bucket labels, worst first. Ranges are open below and closed above; the last
/// one also includes 0.
pub const BUCKET_LABELS: [&str; BUCKETS] = [
    "(90,inf)", "(80,90]", "(70,80]", "(60,70]", "(50,60]", "(40,50]", "(30,40]", "(20,30]", "(10,20]", "[0,10]",
];

/// Bucket of a sentence by exact integer comparison of `100 * edits / ref_len`
/// against the thresholds. An empty reference with edits counts as worst.
pub fn bucket_index(edits: u64, ref_len: u64) -> usize {
    if ref_len == 0 {
        return if edits > 0 { 0 } else { BUCKETS - 1 };
    }
    (0..BUCKETS - 1)
        .find(|&j| 100 * edits as u128 > (90 - 10 * j as u128) * ref_len as u128)
        .unwrap_or(BUCKETS - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub range: String,
    pub count: usize,
    /// Corpus TER of the subset in points; `None` for an empty subset.
    pub baseline_ter: Option<f64>,
    pub ape_ter: Option<f64>,
    /// Negative when the APE output improves the subset.
    pub delta_ter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketAnalysis {
    pub total: usize,
    pub buckets: Vec<Bucket>,
}

impl BucketAnalysis {
    /// Plot data as CSV: `range,count,baseline_ter,ape_ter,delta_ter`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(["range", "count", "baseline_ter", "ape_ter", "delta_ter"])
            .map_err(csv_err)?;
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for b in &self.buckets {
            w.write_record([
                b.range.clone(),
                b.count.to_string(),
                cell(b.baseline_ter),
                cell(b.ape_ter),
                cell(b.delta_ter),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub fn ter_buckets<S: AsRef<str> + Sync>(
    baseline: &[S],
    ape: &[S],
    refs: &[S],
    tok: &TokenizerConfig,
) -> Result<BucketAnalysis> {
    if ape.len() != baseline.len() {
        return Err(Error::LengthMismatch {
            expected: baseline.len(),
            actual: ape.len(),
        });
    }
    if refs.is_empty() {
        return Err(Error::Empty("reference list"));
    }
    let base = ter_sentence_stats(baseline, refs, tok)?;
    let post = ter_sentence_stats(ape, refs, tok)?;

    // (count, baseline edits, ape edits, ref words)
    let mut acc = [(0usize, 0u64, 0u64, 0u64); BUCKETS];
    for ((be, len), (pe, _)) in base.iter().zip(&post) {
        let slot = &mut acc[bucket_index(be.total(), *len)];
        slot.0 += 1;
        slot.1 += be.total();
        slot.2 += pe.total();
        slot.3 += len;
    }
    let buckets = acc
        .iter()
        .zip(BUCKET_LABELS)
        .map(|(&(count, b, p, len), range)| {
            let ter = |e: u64| (count > 0 && len > 0).then(|| 100.0 * e as f64 / len as f64);
            let (baseline_ter, ape_ter) = (ter(b), ter(p));
            Bucket {
                range: range.to_string(),
                count,
                baseline_ter,
                ape_ter,
                delta_ter: baseline_ter.zip(ape_ter).map(|(x, y)| y - x),
            }
        })
        .collect();
    Ok(BucketAnalysis {
        total: refs.len(),
        buckets,
    })
}
