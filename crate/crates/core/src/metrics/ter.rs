//! Translation edit rate with block shifts.
//!
//! The shift search follows TERCOM: a candidate shift moves a hypothesis span
//! that also occurs in the reference, is currently misaligned, and lands next to
//! the reference position of its match. Candidates are ranked by edit-distance
//! gain, then span length, then earliest source, then earliest destination. The
//! best candidate is applied while it lowers the edit distance; every applied
//! shift costs one edit.
//!
//! Edit counts use the reference-side convention: a *deletion* is a reference
//! word the hypothesis lacks, an *insertion* is a surplus hypothesis word.

use std::collections::{HashMap, HashSet};
use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bleu::check_aligned;
use super::tokenize::{tokenize, TokenizerConfig};
use crate::error::{Error, Result};

/// Longest span a shift may move.
pub const MAX_SHIFT_SIZE: usize = 10;
/// Largest distance between the hypothesis and reference positions of a shifted span.
pub const MAX_SHIFT_DIST: usize = 50;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerEdits {
    pub insertions: u64,
    pub deletions: u64,
    pub substitutions: u64,
    pub shifts: u64,
}

impl TerEdits {
    pub fn total(&self) -> u64 {
        self.insertions + self.deletions + self.substitutions + self.shifts
    }
}

impl Add for TerEdits {
    type Output = TerEdits;

    fn add(self, o: TerEdits) -> TerEdits {
        TerEdits {
            insertions: self.insertions + o.insertions,
            deletions: self.deletions + o.deletions,
            substitutions: self.substitutions + o.substitutions,
            shifts: self.shifts + o.shifts,
        }
    }
}

impl AddAssign for TerEdits {
    fn add_assign(&mut self, o: TerEdits) {
        *self = *self + o;
    }
}

/// Edits and reference length of one sentence or a whole corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TerScore {
    pub edits: TerEdits,
    pub ref_len: u64,
    /// `edits.total() / ref_len`, as a fraction.
    pub score: f64,
}

impl TerScore {
    pub fn new(edits: TerEdits, ref_len: u64) -> Result<Self> {
        if ref_len == 0 {
            return Err(Error::ZeroDenominator("TER reference length"));
        }
        Ok(TerScore {
            edits,
            ref_len,
            score: edits.total() as f64 / ref_len as f64,
        })
    }
}

/// One alignment step from the shifted hypothesis to the reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditOp {
    Match,
    /// Replace the hypothesis word with this reference word.
    Substitute(String),
    /// Surplus hypothesis word, dropped.
    Insertion,
    /// Reference word missing from the hypothesis, added.
    Deletion(String),
}

/// Moves `words[start..start + len]` so it lands before index `dest` of the
/// unshifted sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub start: usize,
    pub len: usize,
    pub dest: usize,
}

impl Shift {
    pub fn apply<T: Clone>(&self, words: &[T]) -> Vec<T> {
        perform_shift(words, self.start, self.len, self.dest)
    }
}

/// Shifts applied in order, then an alignment of the shifted hypothesis to the reference.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub shifts: Vec<Shift>,
    pub ops: Vec<EditOp>,
}

impl EditScript {
    /// Replays the script on hypothesis tokens. Yields the reference tokens for
    /// every script produced by [`ter_sentence`].
    pub fn apply(&self, hyp: &[String]) -> Result<Vec<String>> {
        let mut words = hyp.to_vec();
        for s in &self.shifts {
            if s.start + s.len > words.len() || s.dest > words.len() {
                return Err(Error::Invalid(format!("shift {s:?} out of range")));
            }
            words = s.apply(&words);
        }
        let mut out = Vec::with_capacity(words.len());
        let mut pos = 0;
        for op in &self.ops {
            match op {
                EditOp::Match => {
                    let w = words
                        .get(pos)
                        .ok_or_else(|| Error::Invalid("script runs past the hypothesis".into()))?;
                    out.push(w.clone());
                    pos += 1;
                }
                EditOp::Substitute(r) => {
                    pos += 1;
                    out.push(r.clone());
                }
                EditOp::Insertion => pos += 1,
                EditOp::Deletion(r) => out.push(r.clone()),
            }
        }
        if pos != words.len() {
            return Err(Error::Invalid("script leaves hypothesis words unconsumed".into()));
        }
        Ok(out)
    }

    pub fn edits(&self) -> TerEdits {
        let mut e = TerEdits {
            shifts: self.shifts.len() as u64,
            ..Default::default()
        };
        for op in &self.ops {
            match op {
                EditOp::Match => {}
                EditOp::Substitute(_) => e.substitutions += 1,
                EditOp::Insertion => e.insertions += 1,
                EditOp::Deletion(_) => e.deletions += 1,
            }
        }
        e
    }
}

fn perform_shift<T: Clone>(words: &[T], start: usize, len: usize, dest: usize) -> Vec<T> {
    let end = start + len;
    let mut out = Vec::with_capacity(words.len());
    if dest < start {
        out.extend_from_slice(&words[..dest]);
        out.extend_from_slice(&words[start..end]);
        out.extend_from_slice(&words[dest..start]);
        out.extend_from_slice(&words[end..]);
    } else if dest > end {
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[end..dest]);
        out.extend_from_slice(&words[start..end]);
        out.extend_from_slice(&words[dest..]);
    } else {
        out.extend_from_slice(words);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Match,
    Sub,
    Ins,
    Del,
}

/// Levenshtein distance over token ids.
fn edit_distance(hyp: &[u32], reference: &[u32]) -> u64 {
    let m = reference.len();
    let mut prev: Vec<u64> = (0..=m as u64).collect();
    let mut cur = vec![0u64; m + 1];
    for (i, &h) in hyp.iter().enumerate() {
        cur[0] = i as u64 + 1;
        for j in 1..=m {
            let sub = prev[j - 1] + u64::from(h != reference[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Distance plus a backtrace preferring match, substitution, deletion, insertion.
fn align(hyp: &[u32], reference: &[u32]) -> (u64, Vec<Step>) {
    let (n, m) = (hyp.len(), reference.len());
    let w = m + 1;
    let mut dp = vec![0u64; (n + 1) * w];
    for j in 0..=m {
        dp[j] = j as u64;
    }
    for i in 1..=n {
        dp[i * w] = i as u64;
        for j in 1..=m {
            let sub = dp[(i - 1) * w + j - 1] + u64::from(hyp[i - 1] != reference[j - 1]);
            dp[i * w + j] = sub.min(dp[(i - 1) * w + j] + 1).min(dp[i * w + j - 1] + 1);
        }
    }
    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * w + j];
        if i > 0 && j > 0 && hyp[i - 1] == reference[j - 1] && here == dp[(i - 1) * w + j - 1] {
            steps.push(Step::Match);
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && here == dp[(i - 1) * w + j - 1] + 1 {
            steps.push(Step::Sub);
            i -= 1;
            j -= 1;
        } else if j > 0 && here == dp[i * w + j - 1] + 1 {
            steps.push(Step::Del);
            j -= 1;
        } else {
            steps.push(Step::Ins);
            i -= 1;
        }
    }
    steps.reverse();
    (dp[n * w + m], steps)
}

struct Alignment {
    /// Reference position -> hypothesis position (-1 before the first word).
    ref_to_hyp: Vec<i64>,
    hyp_err: Vec<bool>,
    ref_err: Vec<bool>,
}

fn alignment_of(steps: &[Step], n: usize, m: usize) -> Alignment {
    let mut a = Alignment {
        ref_to_hyp: vec![-1; m],
        hyp_err: vec![false; n],
        ref_err: vec![false; m],
    };
    let (mut h, mut r) = (-1i64, -1i64);
    for step in steps {
        match step {
            Step::Match | Step::Sub => {
                h += 1;
                r += 1;
                a.ref_to_hyp[r as usize] = h;
                let err = *step == Step::Sub;
                a.hyp_err[h as usize] = err;
                a.ref_err[r as usize] = err;
            }
            Step::Ins => {
                h += 1;
                a.hyp_err[h as usize] = true;
            }
            Step::Del => {
                r += 1;
                a.ref_to_hyp[r as usize] = h;
                a.ref_err[r as usize] = true;
            }
        }
    }
    a
}

/// `(start_h, start_r, len)` of every hypothesis span that also occurs in the reference.
fn shifted_pairs(hyp: &[u32], reference: &[u32]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for start_h in 0..hyp.len() {
        for start_r in 0..reference.len() {
            if start_h.abs_diff(start_r) > MAX_SHIFT_DIST {
                continue;
            }
            let mut len = 0;
            while len < MAX_SHIFT_SIZE
                && start_h + len < hyp.len()
                && start_r + len < reference.len()
                && hyp[start_h + len] == reference[start_r + len]
            {
                len += 1;
                out.push((start_h, start_r, len));
            }
        }
    }
    out
}

/// Best shift for the current hypothesis and its edit-distance gain.
fn best_shift(hyp: &[u32], reference: &[u32]) -> Option<(u64, Shift, Vec<u32>)> {
    let (pre, steps) = align(hyp, reference);
    let al = alignment_of(&steps, hyp.len(), reference.len());
    // (gain, len, -start, -dest) ordering, maximized.
    let mut best: Option<((u64, usize, std::cmp::Reverse<usize>, std::cmp::Reverse<usize>), Shift, Vec<u32>)> = None;
    for (start_h, start_r, len) in shifted_pairs(hyp, reference) {
        if !al.hyp_err[start_h..start_h + len].iter().any(|&e| e) {
            continue;
        }
        if !al.ref_err[start_r..start_r + len].iter().any(|&e| e) {
            continue;
        }
        let target = al.ref_to_hyp[start_r];
        if target >= start_h as i64 && target < (start_h + len) as i64 {
            continue;
        }
        let mut prev_dest = None;
        for offset in -1..len as i64 {
            let r = start_r as i64 + offset;
            let dest = if r == -1 {
                0
            } else if (r as usize) < reference.len() {
                (al.ref_to_hyp[r as usize] + 1) as usize
            } else {
                break;
            };
            if prev_dest == Some(dest) {
                continue;
            }
            prev_dest = Some(dest);
            let shifted = perform_shift(hyp, start_h, len, dest);
            let cost = edit_distance(&shifted, reference);
            let gain = pre.saturating_sub(cost);
            let key = (gain, len, std::cmp::Reverse(start_h), std::cmp::Reverse(dest));
            if best.as_ref().map_or(true, |(k, _, _)| key > *k) {
                best = Some((key, Shift { start: start_h, len, dest }, shifted));
            }
        }
    }
    best.map(|(k, s, w)| (k.0, s, w))
}

fn intern<'a>(tokens: &'a [String], vocab: &mut HashMap<&'a str, u32>) -> Vec<u32> {
    tokens
        .iter()
        .map(|t| {
            let next = vocab.len() as u32;
            *vocab.entry(t.as_str()).or_insert(next)
        })
        .collect()
}

/// Greedy TER over token sequences. Accepts an empty reference.
pub fn ter_tokens(hyp: &[String], reference: &[String]) -> (TerEdits, EditScript) {
    let mut vocab = HashMap::new();
    let ref_ids = intern(reference, &mut vocab);
    let mut words = hyp.to_vec();
    let mut ids = intern(hyp, &mut vocab);

    let mut shifts = Vec::new();
    let cap = 2 * reference.len();
    while shifts.len() < cap {
        match best_shift(&ids, &ref_ids) {
            Some((gain, shift, shifted)) if gain > 0 => {
                words = shift.apply(&words);
                ids = shifted;
                shifts.push(shift);
            }
            _ => break,
        }
    }

    let (_, steps) = align(&ids, &ref_ids);
    let mut r = 0;
    let ops = steps
        .iter()
        .map(|s| {
            let op = match s {
                Step::Match => EditOp::Match,
                Step::Sub => EditOp::Substitute(reference[r].clone()),
                Step::Ins => return EditOp::Insertion,
                Step::Del => EditOp::Deletion(reference[r].clone()),
            };
            r += 1;
            op
        })
        .collect();
    let script = EditScript { shifts, ops };
    (script.edits(), script)
}

/// Sentence TER. The reference must contain at least one token.
pub fn ter_sentence(hyp: &str, reference: &str, tok: &TokenizerConfig) -> Result<(TerScore, EditScript)> {
    let r = tokenize(reference, tok);
    if r.is_empty() {
        return Err(Error::Empty("TER reference"));
    }
    let (edits, script) = ter_tokens(&tokenize(hyp, tok), &r);
    Ok((TerScore::new(edits, r.len() as u64)?, script))
}

/// Per-sentence `(edits, ref_len)` in input order; empty references allowed.
pub fn ter_sentence_stats<S: AsRef<str> + Sync>(
    hyps: &[S],
    refs: &[S],
    tok: &TokenizerConfig,
) -> Result<Vec<(TerEdits, u64)>> {
    check_aligned(hyps.len(), refs.len())?;
    Ok(hyps
        .par_iter()
        .zip(refs.par_iter())
        .map(|(h, r)| {
            let r = tokenize(r.as_ref(), tok);
            let (edits, _) = ter_tokens(&tokenize(h.as_ref(), tok), &r);
            (edits, r.len() as u64)
        })
        .collect())
}

/// Sums per-sentence statistics into a corpus score.
pub fn ter_from_stats(stats: &[(TerEdits, u64)]) -> Result<TerScore> {
    let (edits, ref_len) = stats
        .iter()
        .fold((TerEdits::default(), 0), |(e, l), (se, sl)| (e + *se, l + sl));
    TerScore::new(edits, ref_len)
}

/// Corpus TER: total edits over total reference length.
pub fn ter_corpus<S: AsRef<str> + Sync>(hyps: &[S], refs: &[S], tok: &TokenizerConfig) -> Result<TerScore> {
    ter_from_stats(&ter_sentence_stats(hyps, refs, tok)?)
}

/// Limits of the exhaustive oracle.
pub const ORACLE_MAX_TOKENS: usize = 8;
pub const ORACLE_MAX_DEPTH: usize = 3;

/// Minimum of `shifts + edit distance` over every sequence of at most
/// `max_depth` shifts, each moving any span of up to [`MAX_SHIFT_SIZE`] words to
/// any other position. Desk-scale only: inputs are capped at
/// [`ORACLE_MAX_TOKENS`] tokens and [`ORACLE_MAX_DEPTH`] shifts.
pub fn ter_oracle(hyp: &str, reference: &str, tok: &TokenizerConfig, max_depth: usize) -> Result<u64> {
    let h = tokenize(hyp, tok);
    let r = tokenize(reference, tok);
    if h.len() > ORACLE_MAX_TOKENS || r.len() > ORACLE_MAX_TOKENS {
        return Err(Error::OracleLimit(format!(
            "at most {ORACLE_MAX_TOKENS} tokens per side, got {} and {}",
            h.len(),
            r.len()
        )));
    }
    if max_depth > ORACLE_MAX_DEPTH {
        return Err(Error::OracleLimit(format!(
            "shift depth at most {ORACLE_MAX_DEPTH}, got {max_depth}"
        )));
    }
    Ok(oracle_tokens(&h, &r, max_depth))
}

/// Exhaustive search behind [`ter_oracle`], without the size checks.
pub fn oracle_tokens(hyp: &[String], reference: &[String], max_depth: usize) -> u64 {
    let mut vocab = HashMap::new();
    let r = intern(reference, &mut vocab);
    let h = intern(hyp, &mut vocab);

    // Edit distance can never drop below the bag-of-words mismatch, which no
    // shift changes.
    let mut bag: HashMap<u32, i64> = HashMap::new();
    for &t in &h {
        *bag.entry(t).or_insert(0) += 1;
    }
    let mut common = 0u64;
    for &t in &r {
        if let Some(c) = bag.get_mut(&t) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    let floor = h.len().max(r.len()) as u64 - common;

    let mut best = edit_distance(&h, &r);
    let mut seen: HashSet<Vec<u32>> = HashSet::from([h.clone()]);
    let mut frontier = vec![h];
    for depth in 1..=max_depth as u64 {
        if depth + floor >= best {
            break;
        }
        let mut next = Vec::new();
        for state in &frontier {
            let n = state.len();
            for start in 0..n {
                for len in 1..=MAX_SHIFT_SIZE.min(n - start) {
                    for dest in (0..start).chain(start + len + 1..=n) {
                        let shifted = perform_shift(state, start, len, dest);
                        if seen.insert(shifted.clone()) {
                            best = best.min(depth + edit_distance(&shifted, &r));
                            next.push(shifted);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    best
}

/// Word-level edit distance without shifts.
pub fn shift_free_distance(hyp: &[String], reference: &[String]) -> u64 {
    let mut vocab = HashMap::new();
    let r = intern(reference, &mut vocab);
    let h = intern(hyp, &mut vocab);
    edit_distance(&h, &r)
}
