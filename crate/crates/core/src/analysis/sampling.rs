//! Seeded subsampling for data-size curves and min/mean/max aggregation.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::triplet::Corpus;

/// Corpus size of the WMT APE EN-DE task, drawn as a vertical marker on curves.
pub const WMT_APE_SIZE: usize = 13_441;
pub const DEFAULT_REPLICATES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub sizes: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

impl SampleSpec {
    pub fn new(sizes: Vec<usize>, replicates: usize, base_seed: u64) -> Self {
        SampleSpec {
            sizes,
            replicates,
            base_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("no sample sizes given".into()));
        }
        if self.sizes[0] == 0 {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sample sizes must be strictly ascending".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seed_for(&self, size: usize, replicate: usize) -> u64 {
        seed::derive(self.base_seed, &[size as u64, replicate as u64])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub size: usize,
    pub replicate: usize,
    pub seed: u64,
    pub corpus: Corpus,
}

/// Draws `replicates` independent samples without replacement for every size.
/// Selected triplets keep their corpus order.
pub fn draw_samples(corpus: &Corpus, spec: &SampleSpec) -> Result<Vec<Sample>> {
    spec.validate()?;
    let largest = *spec.sizes.last().expect("validated");
    if largest > corpus.len() {
        return Err(Error::SizeTooLarge {
            requested: largest,
            available: corpus.len(),
        });
    }
    let jobs: Vec<(usize, usize)> = spec
        .sizes
        .iter()
        .flat_map(|&s| (0..spec.replicates).map(move |r| (s, r)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(size, replicate)| {
            let seed = spec.seed_for(size, replicate);
            let mut idx = rand::seq::index::sample(&mut seed::rng(seed), corpus.len(), size).into_vec();
            idx.sort_unstable();
            let triplets = idx.into_iter().map(|i| corpus.triplets[i].clone()).collect();
            Sample {
                size,
                replicate,
                seed,
                corpus: corpus.with_triplets(triplets),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub metric: String,
    pub size: usize,
    pub replicates: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub metric: String,
    pub points: Vec<CurvePoint>,
    /// Horizontal reference line, e.g. the unedited MT score.
    pub baseline: Option<f64>,
    pub markers: Vec<Marker>,
}

impl CurveReport {
    /// Plot data as CSV: `size,mean,min,max`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(["size", "mean", "min", "max"]).map_err(csv_err)?;
        for p in &self.points {
            w.write_record([p.size.to_string(), p.mean.to_string(), p.min.to_string(), p.max.to_string()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Aggregates `(size, replicate, value)` results into one point per size.
pub fn curve_report(metric: &str, results: &[(usize, usize, f64)], baseline: Option<f64>) -> Result<CurveReport> {
    if results.is_empty() {
        return Err(Error::Empty("curve results"));
    }
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(size, _, v) in results {
        by_size.entry(size).or_default().push(v);
    }
    let points = by_size
        .into_iter()
        .map(|(size, vals)| {
            let n = vals.len();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            CurvePoint {
                metric: metric.to_string(),
                size,
                replicates: n,
                // Rounding in the sum can push the mean a hair outside the range.
                mean: mean.clamp(min, max),
                min,
                max,
            }
        })
        .collect();
    Ok(CurveReport {
        metric: metric.to_string(),
        points,
        baseline,
        markers: vec![Marker {
            label: "WMT APE EN-DE".into(),
            size: WMT_APE_SIZE,
        }],
    })
}

/// Produces a metric value for a trained-and-evaluated sample.
pub trait Scorer: Sync {
    fn score(&self, sample: &Sample) -> Result<f64>;
}

/// Stand-in for model training: a saturating curve in the sample size plus
/// seeded jitter per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockScorer {
    pub seed: u64,
    pub ceiling: f64,
    pub jitter: f64,
}

impl Default for MockScorer {
    fn default() -> Self {
        MockScorer {
            seed: 0,
            ceiling: 70.0,
            jitter: 1.0,
        }
    }
}

impl Scorer for MockScorer {
    fn score(&self, sample: &Sample) -> Result<f64> {
        let mut rng = seed::rng(seed::derive(self.seed, &[sample.seed]));
        let n = sample.corpus.len() as f64;
        let base = self.ceiling * n / (n + 500.0);
        Ok(base + self.jitter * (rng.random::<f64>() - 0.5))
    }
}

/// Scores every sample and aggregates the curve.
pub fn run_protocol(
    samples: &[Sample],
    scorer: &dyn Scorer,
    metric: &str,
    baseline: Option<f64>,
) -> Result<(Vec<(usize, usize, f64)>, CurveReport)> {
    let results = samples
        .par_iter()
        .map(|s| Ok((s.size, s.replicate, scorer.score(s)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = curve_report(metric, &results, baseline)?;
    Ok((results, report))
}
