//! Cohen's kappa, quadratically weighted kappa and their pairwise average.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    #[default]
    None,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    /// For the weighted variant, one minus the mean weighted disagreement.
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub weighting: Weighting,
}

fn check_pair(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { expected: a, actual: b });
    }
    if a == 0 {
        return Err(Error::Empty("ratings"));
    }
    Ok(())
}

/// Unweighted kappa over any categorical labels.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<KappaResult> {
    check_pair(a.len(), b.len())?;
    let n = a.len() as f64;
    let mut margins: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        margins.entry(x).or_default().0 += 1;
        margins.entry(y).or_default().1 += 1;
        agree += usize::from(x == y);
    }
    let observed = agree as f64 / n;
    let expected: f64 = margins.values().map(|&(p, q)| (p as f64 / n) * (q as f64 / n)).sum();
    if expected >= 1.0 {
        return Err(Error::UndefinedAgreement("expected agreement is 1"));
    }
    Ok(KappaResult {
        kappa: (observed - expected) / (1.0 - expected),
        observed_agreement: observed,
        expected_agreement: expected,
        weighting: Weighting::None,
    })
}

/// Quadratically weighted kappa on the ordinal scale `min..=max`.
pub fn weighted_kappa(a: &[i64], b: &[i64], min: i64, max: i64) -> Result<KappaResult> {
    check_pair(a.len(), b.len())?;
    if max <= min {
        return Err(Error::Config(format!("rating scale {min}..{max} is empty")));
    }
    if let Some(x) = a.iter().chain(b).find(|x| !(min..=max).contains(*x)) {
        return Err(Error::Invalid(format!("rating {x} outside {min}..{max}")));
    }
    let k = (max - min + 1) as usize;
    let span = ((max - min) * (max - min)) as f64;
    let w = |i: usize, j: usize| {
        let d = i as f64 - j as f64;
        d * d / span
    };
    let n = a.len() as f64;
    let (mut pa, mut pb) = (vec![0.0; k], vec![0.0; k]);
    let mut observed_dis = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (i, j) = ((x - min) as usize, (y - min) as usize);
        pa[i] += 1.0 / n;
        pb[j] += 1.0 / n;
        observed_dis += w(i, j) / n;
    }
    let mut expected_dis = 0.0;
    for i in 0..k {
        for j in 0..k {
            expected_dis += pa[i] * pb[j] * w(i, j);
        }
    }
    if expected_dis <= 0.0 {
        return Err(Error::UndefinedAgreement("expected weighted disagreement is 0"));
    }
    Ok(KappaResult {
        kappa: 1.0 - observed_dis / expected_dis,
        observed_agreement: 1.0 - observed_dis,
        expected_agreement: 1.0 - expected_dis,
        weighting: Weighting::Quadratic,
    })
}

/// Kappa of one annotator pair; `None` when undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairKappa {
    pub a: String,
    pub b: String,
    pub items: usize,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseAgreement {
    pub weighting: Weighting,
    /// Mean over defined pairs, `None` when every pair was skipped.
    pub mean: Option<f64>,
    pub pairs: Vec<PairKappa>,
    pub skipped: usize,
}

/// Mean kappa over all unordered annotator pairs.
///
/// `ratings[k][i]` is annotator `k`'s score for item `i`; `None` marks a missing
/// or undecided rating. Each pair is scored on the items both annotators rated.
pub fn pairwise_average_kappa(
    names: &[String],
    ratings: &[Vec<Option<i64>>],
    weighting: Weighting,
    scale: (i64, i64),
) -> Result<PairwiseAgreement> {
    if names.len() != ratings.len() {
        return Err(Error::LengthMismatch {
            expected: names.len(),
            actual: ratings.len(),
        });
    }
    if ratings.len() < 2 {
        return Err(Error::Invalid("agreement needs at least two annotators".into()));
    }
    let items = ratings[0].len();
    if let Some(r) = ratings.iter().find(|r| r.len() != items) {
        return Err(Error::LengthMismatch {
            expected: items,
            actual: r.len(),
        });
    }
    let mut pairs = Vec::new();
    let mut sum = 0.0;
    let mut defined = 0;
    for i in 0..ratings.len() {
        for j in i + 1..ratings.len() {
            let (x, y): (Vec<i64>, Vec<i64>) = ratings[i]
                .iter()
                .zip(&ratings[j])
                .filter_map(|(p, q)| Some(((*p)?, (*q)?)))
                .unzip();
            let result = match weighting {
                Weighting::None => cohen_kappa(&x, &y),
                Weighting::Quadratic => weighted_kappa(&x, &y, scale.0, scale.1),
            };
            let kappa = match result {
                Ok(r) => Some(r.kappa),
                Err(Error::UndefinedAgreement(_) | Error::Empty(_)) => None,
                Err(e) => return Err(e),
            };
            if let Some(k) = kappa {
                sum += k;
                defined += 1;
            }
            pairs.push(PairKappa {
                a: names[i].clone(),
                b: names[j].clone(),
                items: x.len(),
                kappa,
            });
        }
    }
    Ok(PairwiseAgreement {
        weighting,
        mean: (defined > 0).then(|| sum / defined as f64),
        skipped: pairs.len() - defined,
        pairs,
    })
}
