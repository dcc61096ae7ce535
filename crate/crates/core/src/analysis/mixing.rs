//! Upsampled corpus mixing.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;
use crate::triplet::Corpus;

/// Repeats every triplet of `a` `factor` times, appends `b` and shuffles.
///
/// Copies get ids `{id}@{k}` and keep the original id under `source_id` in meta.
/// Languages come from `a`.
pub fn upsample_mix(a: &Corpus, factor: usize, b: &Corpus, seed: u64) -> Result<Corpus> {
    if factor == 0 {
        return Err(Error::Config("upsampling factor must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(factor * a.len() + b.len());
    for k in 0..factor {
        for t in a {
            let mut copy = t.clone();
            copy.id = format!("{}@{k}", t.id);
            copy.set_meta("source_id", t.id.clone());
            out.push(copy);
        }
    }
    out.extend(b.iter().cloned());
    let mut seen = HashSet::with_capacity(out.len());
    if let Some(dup) = out.iter().find(|t| !seen.insert(t.id.as_str())) {
        return Err(Error::DuplicateId(dup.id.clone()));
    }
    out.shuffle(&mut seed::rng(seed));
    Ok(a.with_triplets(out))
}
