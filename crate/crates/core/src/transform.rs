//! Change-tracked subtitle cleanup and its inverse.
//!
//! [`preprocess`] splits a triplet at `<br>` (when all three fields carry the same
//! number of breaks), then strips markup tags, music notes and one leading hyphen
//! from every part. Each removal is logged as an [`Edit`] whose offset is a
//! character position in the text *right after* that edit. Replaying the edits of
//! a part in reverse order therefore rebuilds the raw text exactly.
//!
//! [`postprocess`] rebuilds a field from system outputs. When an output equals
//! the cleaned part, the result is byte-identical to the raw input. When the
//! system changed the text, removed material is re-anchored instead: runs at the
//! start or end of the part (leading hyphens, whole-segment italics, framing
//! notes) re-attach at the boundaries, and interior runs are restored only where
//! both neighbouring characters survived side by side. Interior runs that cannot
//! be placed are dropped and counted in [`Restored::irrecoverable`].

use std::collections::{BTreeMap, HashSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triplet::{Field, Triplet};

static BR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<br\s*/?\s*>").unwrap());
static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[a-zA-Z/][^>]*>").unwrap());

/// Note glyphs removed by default: U+2669, U+266A, U+266B, U+266C.
pub const MUSIC_SYMBOLS: [char; 4] = ['\u{2669}', '\u{266A}', '\u{266B}', '\u{266C}'];

fn is_music(c: char) -> bool {
    MUSIC_SYMBOLS.contains(&c)
}

fn is_leading_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    /// Part boundary at a `<br>`; the payload is the literal break tag.
    SplitBr,
    /// `<br>` replaced by a space because the fields disagree on break counts.
    ReplacedBr,
    RemovedTag,
    RemovedMusic,
    RemovedLeadingHyphen,
    /// Surplus whitespace removed after the other cleanups.
    NormalizedSpace,
}

/// One reversible change to a text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub kind: ChangeKind,
    /// Character offset in the text immediately after this change.
    pub offset: usize,
    /// Literal text that was removed.
    pub payload: String,
    /// Text that took the payload's place, usually empty.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub replacement: String,
}

/// An [`Edit`] located in one part of one field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub field: Field,
    pub part: usize,
    #[serde(flatten)]
    pub edit: Edit,
}

/// Cleaned text of one part, kept so edited outputs can be re-anchored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedPart {
    pub field: Field,
    pub part: usize,
    pub text: String,
}

/// Everything needed to undo [`preprocess`] for one triplet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeLog {
    pub parent_id: String,
    /// Number of parts every field was split into.
    pub parts: usize,
    pub records: Vec<ChangeRecord>,
    /// Cleaned text of every part that has at least one change.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cleaned: Vec<CleanedPart>,
}

impl ChangeLog {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn edits(&self, field: Field, part: usize) -> Vec<&Edit> {
        self.records
            .iter()
            .filter(|r| r.field == field && r.part == part && r.edit.kind != ChangeKind::SplitBr)
            .map(|r| &r.edit)
            .collect()
    }

    fn cleaned_text(&self, field: Field, part: usize) -> Option<&str> {
        self.cleaned
            .iter()
            .find(|c| c.field == field && c.part == part)
            .map(|c| c.text.as_str())
    }
}

/// One cleaned training instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanTriplet {
    pub parent_id: String,
    pub part_index: usize,
    pub src: String,
    pub mt: String,
    pub pe: String,
}

impl CleanTriplet {
    pub fn field(&self, field: Field) -> &str {
        match field {
            Field::Src => &self.src,
            Field::Mt => &self.mt,
            Field::Pe => &self.pe,
        }
    }

    /// As a plain triplet with id `parent#part` and provenance in `meta`.
    pub fn to_triplet(&self) -> Triplet {
        let mut t = Triplet::new(
            format!("{}#{}", self.parent_id, self.part_index),
            self.src.clone(),
            self.mt.clone(),
            self.pe.clone(),
        );
        t.set_meta("parent_id", self.parent_id.clone());
        t.set_meta("part_index", self.part_index.to_string());
        t
    }
}

/// Number of `<br>` tags, case-insensitive, with or without a closing slash.
pub fn count_br(text: &str) -> usize {
    BR.find_iter(text).count()
}

/// Splits at every `<br>`, returning the parts and the break literals between them.
fn split_br(text: &str) -> (Vec<String>, Vec<String>) {
    let mut parts = Vec::new();
    let mut breaks = Vec::new();
    let mut last = 0;
    for m in BR.find_iter(text) {
        parts.push(text[last..m.start()].to_string());
        breaks.push(m.as_str().to_string());
        last = m.end();
    }
    parts.push(text[last..].to_string());
    (parts, breaks)
}

/// Replaces every `<br>` with one space, logging each replacement.
fn replace_br(text: &str) -> (String, Vec<Edit>) {
    let mut out = String::with_capacity(text.len());
    let mut out_chars = 0;
    let mut edits = Vec::new();
    let mut last = 0;
    for m in BR.find_iter(text) {
        let before = &text[last..m.start()];
        out.push_str(before);
        out_chars += before.chars().count();
        edits.push(Edit {
            kind: ChangeKind::ReplacedBr,
            offset: out_chars,
            payload: m.as_str().to_string(),
            replacement: " ".into(),
        });
        out.push(' ');
        out_chars += 1;
        last = m.end();
    }
    out.push_str(&text[last..]);
    (out, edits)
}

/// Splits a triplet at `<br>` when all fields agree on the break count.
///
/// Parts get ids `id#k` and carry `parent_id`/`part_index` metadata. Otherwise
/// the original comes back alone with every `<br>` replaced by a space.
pub fn split_multiline(triplet: &Triplet) -> Vec<Triplet> {
    let counts = Field::ALL.map(|f| count_br(triplet.field(f)));
    if counts[0] >= 1 && counts.iter().all(|&c| c == counts[0]) {
        let split = Field::ALL.map(|f| split_br(triplet.field(f)).0);
        (0..=counts[0])
            .map(|k| {
                let mut t = Triplet::new(
                    format!("{}#{k}", triplet.id),
                    split[0][k].clone(),
                    split[1][k].clone(),
                    split[2][k].clone(),
                );
                t.meta = triplet.meta.clone();
                t.set_meta("parent_id", triplet.id.clone());
                t.set_meta("part_index", k.to_string());
                t
            })
            .collect()
    } else {
        let mut t = triplet.clone();
        for f in Field::ALL {
            let replaced = replace_br(t.field(f)).0;
            *t.field_mut(f) = replaced;
        }
        vec![t]
    }
}

/// Left-to-right rewriting pass that records every removal.
struct Pass {
    out: Vec<char>,
    edits: Vec<Edit>,
}

impl Pass {
    fn new(capacity: usize) -> Self {
        Pass {
            out: Vec::with_capacity(capacity),
            edits: Vec::new(),
        }
    }

    fn remove(&mut self, kind: ChangeKind, payload: String) {
        self.edits.push(Edit {
            kind,
            offset: self.out.len(),
            payload,
            replacement: String::new(),
        });
    }
}

fn remove_tags(text: &[char]) -> (Vec<char>, Vec<Edit>) {
    let s: String = text.iter().collect();
    let mut pass = Pass::new(text.len());
    let mut last = 0;
    for m in TAG.find_iter(&s) {
        pass.out.extend(s[last..m.start()].chars());
        pass.remove(ChangeKind::RemovedTag, m.as_str().to_string());
        last = m.end();
    }
    pass.out.extend(s[last..].chars());
    (pass.out, pass.edits)
}

fn remove_music(text: &[char]) -> (Vec<char>, Vec<Edit>) {
    let mut pass = Pass::new(text.len());
    let mut i = 0;
    while i < text.len() {
        let c = text[i];
        if !is_music(c) {
            pass.out.push(c);
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < text.len() && text[end].is_whitespace() {
            end += 1;
        }
        let mut payload = String::new();
        if end == i + 1 {
            // No trailing space: take the preceding whitespace instead.
            let keep = pass
                .out
                .iter()
                .rposition(|c| !c.is_whitespace())
                .map_or(0, |p| p + 1);
            payload.extend(pass.out.drain(keep..));
        }
        payload.extend(&text[i..end]);
        pass.remove(ChangeKind::RemovedMusic, payload);
        i = end;
    }
    (pass.out, pass.edits)
}

/// Trims both ends and collapses internal whitespace runs to their first character.
fn normalize_space(text: &[char]) -> (Vec<char>, Vec<Edit>) {
    let mut pass = Pass::new(text.len());
    let mut i = 0;
    while i < text.len() {
        if !text[i].is_whitespace() {
            pass.out.push(text[i]);
            i += 1;
            continue;
        }
        let mut end = i;
        while end < text.len() && text[end].is_whitespace() {
            end += 1;
        }
        let at_edge = pass.out.is_empty() || end == text.len();
        let keep = if at_edge { 0 } else { 1 };
        pass.out.extend(&text[i..i + keep]);
        if end - i > keep {
            pass.remove(ChangeKind::NormalizedSpace, text[i + keep..end].iter().collect());
        }
        i = end;
    }
    (pass.out, pass.edits)
}

fn remove_leading_hyphen(text: &[char]) -> (Vec<char>, Vec<Edit>) {
    match text.first() {
        Some(&c) if is_leading_hyphen(c) => {
            let mut end = 1;
            while end < text.len() && text[end].is_whitespace() {
                end += 1;
            }
            let edit = Edit {
                kind: ChangeKind::RemovedLeadingHyphen,
                offset: 0,
                payload: text[..end].iter().collect(),
                replacement: String::new(),
            };
            (text[end..].to_vec(), vec![edit])
        }
        _ => (text.to_vec(), Vec::new()),
    }
}

/// Removes markup tags, music notes and one leading hyphen (with the space after
/// it), then trims and collapses whitespace. Every removal is logged in order.
///
/// A `<` that never closes is not markup and stays in place.
pub fn strip_markup(text: &str) -> (String, Vec<Edit>) {
    let mut chars: Vec<char> = text.chars().collect();
    let mut edits = Vec::new();
    // Removing a tag can expose a new one, as in `<<i>b>`.
    loop {
        let (next, e) = remove_tags(&chars);
        if e.is_empty() {
            break;
        }
        chars = next;
        edits.extend(e);
    }
    for step in [remove_music, normalize_space, remove_leading_hyphen] {
        let (next, e) = step(&chars);
        chars = next;
        edits.extend(e);
    }
    (chars.into_iter().collect(), edits)
}

/// Undoes `edits` on `clean` by replaying them in reverse.
pub fn replay(clean: &str, edits: &[&Edit]) -> Result<String> {
    let mut chars: Vec<char> = clean.chars().collect();
    for e in edits.iter().rev() {
        let cut = e.replacement.chars().count();
        if e.offset + cut > chars.len() {
            return Err(Error::Invalid(format!(
                "change at offset {} does not fit a text of {} characters",
                e.offset,
                chars.len()
            )));
        }
        chars.splice(e.offset..e.offset + cut, e.payload.chars());
    }
    Ok(chars.into_iter().collect())
}

/// True when `text` has no `<br>`, tag, music note or leading hyphen.
pub fn is_clean(text: &str) -> bool {
    !BR.is_match(text)
        && !TAG.is_match(text)
        && !text.chars().any(is_music)
        && !text.chars().next().is_some_and(is_leading_hyphen)
}

/// Splits and cleans a triplet, returning the parts and the log that undoes them.
pub fn preprocess(triplet: &Triplet) -> (Vec<CleanTriplet>, ChangeLog) {
    let counts = Field::ALL.map(|f| count_br(triplet.field(f)));
    let split = counts[0] >= 1 && counts.iter().all(|&c| c == counts[0]);
    let parts = if split { counts[0] + 1 } else { 1 };

    let mut log = ChangeLog {
        parent_id: triplet.id.clone(),
        parts,
        ..ChangeLog::default()
    };
    let mut cleaned: Vec<[String; 3]> = vec![Default::default(); parts];

    for (fi, field) in Field::ALL.into_iter().enumerate() {
        let raw = triplet.field(field);
        let mut pre_edits: Vec<Edit> = Vec::new();
        let raw_parts = if split {
            let (p, breaks) = split_br(raw);
            for (k, literal) in breaks.into_iter().enumerate() {
                log.records.push(ChangeRecord {
                    field,
                    part: k,
                    edit: Edit {
                        kind: ChangeKind::SplitBr,
                        offset: 0,
                        payload: literal,
                        replacement: String::new(),
                    },
                });
            }
            p
        } else {
            let (text, edits) = replace_br(raw);
            pre_edits = edits;
            vec![text]
        };

        for (k, part) in raw_parts.iter().enumerate() {
            let (clean, edits) = strip_markup(part);
            let all: Vec<Edit> = if k == 0 {
                std::mem::take(&mut pre_edits).into_iter().chain(edits).collect()
            } else {
                edits
            };
            if !all.is_empty() {
                log.cleaned.push(CleanedPart {
                    field,
                    part: k,
                    text: clean.clone(),
                });
            }
            log.records
                .extend(all.into_iter().map(|edit| ChangeRecord { field, part: k, edit }));
            cleaned[k][fi] = clean;
        }
    }

    let out = cleaned
        .into_iter()
        .enumerate()
        .map(|(k, [src, mt, pe])| CleanTriplet {
            parent_id: triplet.id.clone(),
            part_index: k,
            src,
            mt,
            pe,
        })
        .collect();
    (out, log)
}

/// A rebuilt field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restored {
    pub text: String,
    /// Interior removals that could not be placed in edited output.
    pub irrecoverable: usize,
}

/// Rebuilds one field from per-part system outputs and the preprocessing log.
pub fn postprocess<S: AsRef<str>>(outputs: &[S], log: &ChangeLog, field: Field) -> Result<Restored> {
    if outputs.len() != log.parts {
        return Err(Error::LengthMismatch {
            expected: log.parts,
            actual: outputs.len(),
        });
    }
    let breaks: BTreeMap<usize, &str> = log
        .records
        .iter()
        .filter(|r| r.field == field && r.edit.kind == ChangeKind::SplitBr)
        .map(|r| (r.part, r.edit.payload.as_str()))
        .collect();
    if breaks.len() + 1 != log.parts {
        return Err(Error::Invalid(format!(
            "log for `{}` records {} breaks for {} parts",
            log.parent_id,
            breaks.len(),
            log.parts
        )));
    }

    let mut text = String::new();
    let mut irrecoverable = 0;
    for (k, output) in outputs.iter().enumerate() {
        let output = output.as_ref();
        let edits = log.edits(field, k);
        if !edits.is_empty() {
            let clean = log.cleaned_text(field, k).ok_or_else(|| {
                Error::Invalid(format!("log for `{}` lacks cleaned text of part {k}", log.parent_id))
            })?;
            if clean == output {
                text.push_str(&replay(clean, &edits)?);
            } else {
                let (restored, lost) = reanchor(clean, output, &edits)?;
                text.push_str(&restored);
                irrecoverable += lost;
            }
        } else {
            text.push_str(output);
        }
        if let Some(literal) = breaks.get(&k) {
            text.push_str(literal);
        }
    }
    Ok(Restored { text, irrecoverable })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Item {
    Clean(usize),
    Literal(char),
}

/// Character alignment of `a` to `b` by longest common subsequence.
fn lcs_map(a: &[char], b: &[char]) -> Vec<Option<usize>> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut dp = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i * w + j] = if a[i] == b[j] {
                dp[(i + 1) * w + j + 1] + 1
            } else {
                dp[(i + 1) * w + j].max(dp[i * w + j + 1])
            };
        }
    }
    let mut map = vec![None; n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            map[i] = Some(j);
            i += 1;
            j += 1;
        } else if dp[(i + 1) * w + j] >= dp[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    map
}

/// Restores removed material around an edited output.
fn reanchor(clean: &str, output: &str, edits: &[&Edit]) -> Result<(String, usize)> {
    let c: Vec<char> = clean.chars().collect();
    let e: Vec<char> = output.chars().collect();

    let mut items: Vec<Item> = (0..c.len()).map(Item::Clean).collect();
    for edit in edits.iter().rev() {
        let cut = edit.replacement.chars().count();
        if edit.offset + cut > items.len() {
            return Err(Error::Invalid("change offset out of range".into()));
        }
        items.splice(edit.offset..edit.offset + cut, edit.payload.chars().map(Item::Literal));
    }
    let present: HashSet<usize> = items
        .iter()
        .filter_map(|it| match it {
            Item::Clean(i) => Some(*i),
            Item::Literal(_) => None,
        })
        .collect();
    let map = lcs_map(&c, &e);

    let mut inserts: Vec<(usize, String)> = Vec::new();
    let mut deletes: HashSet<usize> = HashSet::new();
    let mut lost = 0;

    let mut left: Option<usize> = None;
    let mut run = String::new();
    let mut flush = |left: Option<usize>, right: Option<usize>, run: &mut String| {
        let lo = left.map_or(0, |l| l + 1);
        let hi = right.unwrap_or(c.len());
        let consumed: Vec<usize> = (lo..hi).filter(|i| !present.contains(i)).collect();
        if run.is_empty() && consumed.is_empty() {
            return;
        }
        let literal = std::mem::take(run);
        match (left, right) {
            (None, _) => {
                deletes.extend(consumed.iter().filter_map(|&i| map[i]));
                inserts.push((0, literal));
            }
            (Some(_), None) => {
                deletes.extend(consumed.iter().filter_map(|&i| map[i]));
                inserts.push((e.len(), literal));
            }
            (Some(l), Some(r)) => {
                let placed = match (map[l], map[r]) {
                    (Some(i), Some(j)) if j == i + 1 + consumed.len() => consumed
                        .iter()
                        .enumerate()
                        .all(|(k, &ci)| map[ci] == Some(i + 1 + k))
                        .then_some(i + 1),
                    _ => None,
                };
                match placed {
                    Some(at) => {
                        deletes.extend(consumed.iter().filter_map(|&i| map[i]));
                        inserts.push((at, literal));
                    }
                    None if literal.chars().any(|ch| !ch.is_whitespace()) => lost += 1,
                    None => {}
                }
            }
        }
    };
    for item in &items {
        match *item {
            Item::Literal(ch) => run.push(ch),
            Item::Clean(i) => {
                flush(left, Some(i), &mut run);
                left = Some(i);
            }
        }
    }
    flush(left, None, &mut run);

    let mut out = String::with_capacity(output.len() + 16);
    let mut ins = inserts.iter().peekable();
    for (j, &ch) in e.iter().enumerate() {
        while let Some((_, s)) = ins.next_if(|(at, _)| *at == j) {
            out.push_str(s);
        }
        if !deletes.contains(&j) {
            out.push(ch);
        }
    }
    for (_, s) in ins {
        out.push_str(s);
    }
    Ok((out, lost))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(edits: &[Edit]) -> Vec<ChangeKind> {
        edits.iter().map(|e| e.kind).collect()
    }

    #[test]
    fn strip_italics_and_note() {
        let (clean, edits) = strip_markup("<i>Hello</i> \u{266A}");
        assert_eq!(clean, "Hello");
        assert_eq!(
            kinds(&edits),
            [ChangeKind::RemovedTag, ChangeKind::RemovedTag, ChangeKind::RemovedMusic]
        );
        let refs: Vec<&Edit> = edits.iter().collect();
        assert_eq!(replay(&clean, &refs).unwrap(), "<i>Hello</i> \u{266A}");
    }

    #[test]
    fn strip_leading_hyphen() {
        let (clean, edits) = strip_markup("- Hi");
        assert_eq!(clean, "Hi");
        assert_eq!(kinds(&edits), [ChangeKind::RemovedLeadingHyphen]);
        assert_eq!(edits[0].payload, "- ");
    }

    #[test]
    fn plain_text_untouched() {
        let (clean, edits) = strip_markup("Hello");
        assert_eq!(clean, "Hello");
        assert!(edits.is_empty());
    }

    #[test]
    fn unbalanced_angle_bracket_stays() {
        let (clean, edits) = strip_markup("a <b and nothing else");
        assert_eq!(clean, "a <b and nothing else");
        assert!(edits.is_empty());
    }

    #[test]
    fn nested_tag_exposure_is_removed() {
        let (clean, edits) = strip_markup("x<<i>b>y");
        assert_eq!(clean, "xy");
        let refs: Vec<&Edit> = edits.iter().collect();
        assert_eq!(replay(&clean, &refs).unwrap(), "x<<i>b>y");
    }

    #[test]
    fn split_on_matching_breaks() {
        let t = Triplet::new("7", "A<br>B", "C<BR/>D", "E<br />F");
        let parts = split_multiline(&t);
        assert_eq!(parts.len(), 2);
        assert_eq!((parts[0].src.as_str(), parts[0].mt.as_str(), parts[0].pe.as_str()), ("A", "C", "E"));
        assert_eq!((parts[1].src.as_str(), parts[1].mt.as_str(), parts[1].pe.as_str()), ("B", "D", "F"));
        assert_eq!(parts[1].meta_value("part_index"), Some("1"));
        assert_eq!(parts[1].id, "7#1");
    }

    #[test]
    fn mismatched_breaks_become_spaces() {
        let t = Triplet::new("1", "A<br>B", "C D", "E<br>F");
        let parts = split_multiline(&t);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].src, "A B");
        assert_eq!(parts[0].mt, "C D");
        assert_eq!(parts[0].id, "1");
        assert_eq!(split_multiline(&Triplet::new("2", "a", "b", "c")), vec![Triplet::new("2", "a", "b", "c")]);
    }

    #[test]
    fn preprocess_plain_triplet() {
        let t = Triplet::new("1", "Hi", "Hallo", "Hallo!");
        let (parts, log) = preprocess(&t);
        assert_eq!(parts.len(), 1);
        assert_eq!((parts[0].src.as_str(), parts[0].mt.as_str(), parts[0].pe.as_str()), ("Hi", "Hallo", "Hallo!"));
        assert!(log.is_empty());
        assert_eq!(postprocess(&["Hallo"], &log, Field::Mt).unwrap().text, "Hallo");
    }

    #[test]
    fn preprocess_music_italics_and_break() {
        let t = Triplet::new(
            "s1",
            "\u{266A} <i>La</i><br>- Da \u{266A}",
            "\u{266A} <i>La</i><br>- Da \u{266A}",
            "\u{266A} <i>Lala</i><br>- Dada \u{266A}",
        );
        let (parts, log) = preprocess(&t);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].mt, "La");
        assert_eq!(parts[1].mt, "Da");
        assert_eq!(parts[1].pe, "Dada");
        assert!(parts.iter().all(|p| Field::ALL.iter().all(|&f| is_clean(p.field(f)))));
        let mt_kinds: Vec<_> = log.records.iter().filter(|r| r.field == Field::Mt).map(|r| r.edit.kind).collect();
        assert_eq!(
            mt_kinds,
            [
                ChangeKind::SplitBr,
                ChangeKind::RemovedTag,
                ChangeKind::RemovedTag,
                ChangeKind::RemovedMusic,
                ChangeKind::RemovedMusic,
                ChangeKind::RemovedLeadingHyphen,
            ]
        );
        let restored = postprocess(&["La", "Da"], &log, Field::Mt).unwrap();
        assert_eq!(restored.text, t.mt);
        assert_eq!(restored.irrecoverable, 0);
    }

    #[test]
    fn fallback_break_round_trips() {
        let t = Triplet::new("1", "A<br>B", "C <Br> D", "E F");
        let (parts, log) = preprocess(&t);
        assert_eq!(parts[0].mt, "C D");
        assert_eq!(postprocess(&[parts[0].mt.as_str()], &log, Field::Mt).unwrap().text, "C <Br> D");
    }

    #[test]
    fn part_count_mismatch_is_an_error() {
        let (_, log) = preprocess(&Triplet::new("1", "a<br>b", "c<br>d", "e<br>f"));
        let err = postprocess(&["only one"], &log, Field::Mt).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 2, actual: 1 }));
    }

    #[test]
    fn edited_output_keeps_boundary_markup() {
        let mt = "- <i>Ich habe ihn gesehen</i>";
        let (parts, log) = preprocess(&Triplet::new("1", "I saw him", mt, "x"));
        assert_eq!(parts[0].mt, "Ich habe ihn gesehen");
        let r = postprocess(&["Ich sah ihn"], &log, Field::Mt).unwrap();
        assert_eq!(r.text, "- <i>Ich sah ihn</i>");
        assert_eq!(r.irrecoverable, 0);
    }

    #[test]
    fn edited_output_restores_intact_interior_and_drops_lost_ones() {
        let mt = "Das ist <i>sehr</i> gut";
        let (_, log) = preprocess(&Triplet::new("1", "s", mt, "p"));
        // Neighbourhood of both tags survives.
        let r = postprocess(&["Das ist sehr gut!"], &log, Field::Mt).unwrap();
        assert_eq!(r.text, "Das ist <i>sehr</i> gut!");
        assert_eq!(r.irrecoverable, 0);
        // The italicised word is gone: both tags lose their anchors.
        let r = postprocess(&["Das ist prima"], &log, Field::Mt).unwrap();
        assert_eq!(r.text, "Das ist prima");
        assert_eq!(r.irrecoverable, 2);
    }

    #[test]
    fn changelog_json_round_trip() {
        let (_, log) = preprocess(&Triplet::new("1", "<i>a</i><br>b", "\u{266A} c<br>d", "e<br>f"));
        let json = serde_json::to_string(&log).unwrap();
        assert!(json.contains("\"kind\":\"split_br\""));
        let back: ChangeLog = serde_json::from_str(&json).unwrap();
        assert_eq!(back, log);
    }
}
