//! The `(src, mt, pe)` triplet, the corpus container and its on-disk formats.
//!
//! JSONL records look like
//! `{"id": "...", "src": "...", "mt": "...", "pe": "...", "meta": {...}}` where `id`
//! and `meta` are optional. TSV files carry exactly three tab-separated columns
//! `src`, `mt`, `pe` and no header. Records without an id get the zero-padded,
//! one-based line number.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::{Add, AddAssign};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width used when ids are derived from line numbers.
pub const AUTO_ID_WIDTH: usize = 8;

/// One of the three text fields of a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Src,
    Mt,
    Pe,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Src, Field::Mt, Field::Pe];

    pub fn name(self) -> &'static str {
        match self {
            Field::Src => "src",
            Field::Mt => "mt",
            Field::Pe => "pe",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "src" => Ok(Field::Src),
            "mt" => Ok(Field::Mt),
            "pe" => Ok(Field::Pe),
            other => Err(Error::Config(format!("unknown field `{other}`"))),
        }
    }
}

/// A source sentence, its machine translation and the post-edited translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub id: String,
    pub src: String,
    pub mt: String,
    pub pe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<BTreeMap<String, String>>,
}

impl Triplet {
    pub fn new(
        id: impl Into<String>,
        src: impl Into<String>,
        mt: impl Into<String>,
        pe: impl Into<String>,
    ) -> Self {
        Triplet {
            id: id.into(),
            src: src.into(),
            mt: mt.into(),
            pe: pe.into(),
            meta: None,
        }
    }

    pub fn field(&self, field: Field) -> &str {
        match field {
            Field::Src => &self.src,
            Field::Mt => &self.mt,
            Field::Pe => &self.pe,
        }
    }

    pub fn field_mut(&mut self, field: Field) -> &mut String {
        match field {
            Field::Src => &mut self.src,
            Field::Mt => &mut self.mt,
            Field::Pe => &mut self.pe,
        }
    }

    /// Sets a metadata entry, creating the map on first use.
    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta
            .get_or_insert_with(BTreeMap::new)
            .insert(key.into(), value.into());
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.as_ref()?.get(key).map(String::as_str)
    }

    /// Returns the first field that is empty after trimming, if any.
    pub fn blank_field(&self) -> Option<Field> {
        Field::ALL
            .into_iter()
            .find(|&f| self.field(f).trim().is_empty())
    }
}

/// Characters of a text after trimming, internal whitespace included.
pub fn char_len(text: &str) -> usize {
    text.trim().chars().count()
}

/// Tokens obtained by splitting on runs of Unicode whitespace.
pub fn whitespace_token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// An ordered collection of triplets for one language pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub triplets: Vec<Triplet>,
    pub src_lang: String,
    pub tgt_lang: String,
}

impl Corpus {
    pub fn new(src_lang: impl Into<String>, tgt_lang: impl Into<String>) -> Self {
        Corpus {
            triplets: Vec::new(),
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
        }
    }

    pub fn from_triplets(triplets: Vec<Triplet>) -> Self {
        Corpus {
            triplets,
            ..Corpus::default()
        }
    }

    /// Same language pair, different triplets.
    pub fn with_triplets(&self, triplets: Vec<Triplet>) -> Self {
        Corpus {
            triplets,
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
        }
    }

    pub fn with_langs(mut self, src_lang: impl Into<String>, tgt_lang: impl Into<String>) -> Self {
        self.src_lang = src_lang.into();
        self.tgt_lang = tgt_lang.into();
        self
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triplet> {
        self.triplets.iter()
    }

    pub fn push(&mut self, triplet: Triplet) {
        self.triplets.push(triplet);
    }

    /// Checks id uniqueness and that no text field is blank.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.len());
        for (i, t) in self.iter().enumerate() {
            if !seen.insert(t.id.as_str()) {
                return Err(Error::DuplicateId(t.id.clone()));
            }
            if let Some(f) = t.blank_field() {
                return Err(Error::record(i + 1, f.name(), "empty after trimming"));
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> CorpusStats {
        corpus_stats(self)
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Triplet;
    type IntoIter = std::slice::Iter<'a, Triplet>;

    fn into_iter(self) -> Self::IntoIter {
        self.triplets.iter()
    }
}

/// Serialization format of a corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Tsv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Jsonl => "jsonl",
            Format::Tsv => "tsv",
        })
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    src: Option<String>,
    mt: Option<String>,
    pe: Option<String>,
    meta: Option<BTreeMap<String, String>>,
}

fn auto_id(line: usize) -> String {
    format!("{line:0width$}", width = AUTO_ID_WIDTH)
}

fn parse_jsonl_line(line_no: usize, line: &str) -> Result<Triplet> {
    let rec: JsonRecord = serde_json::from_str(line)
        .map_err(|e| Error::record(line_no, "record", format!("invalid JSON: {e}")))?;
    let take = |value: Option<String>, name: &str| {
        value.ok_or_else(|| Error::record(line_no, name, "missing"))
    };
    Ok(Triplet {
        id: rec.id.unwrap_or_else(|| auto_id(line_no)),
        src: take(rec.src, "src")?,
        mt: take(rec.mt, "mt")?,
        pe: take(rec.pe, "pe")?,
        meta: rec.meta,
    })
}

fn parse_tsv_line(line_no: usize, line: &str) -> Result<Triplet> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(Error::record(
            line_no,
            "columns",
            format!("expected 3 tab-separated columns, found {}", cols.len()),
        ));
    }
    Ok(Triplet::new(auto_id(line_no), cols[0], cols[1], cols[2]))
}

/// Parses a corpus from any buffered reader.
pub fn parse_corpus(reader: impl BufRead, format: Format) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::record(line_no, "record", e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let triplet = match format {
            Format::Jsonl => parse_jsonl_line(line_no, &line)?,
            Format::Tsv => parse_tsv_line(line_no, &line)?,
        };
        if let Some(f) = triplet.blank_field() {
            return Err(Error::record(line_no, f.name(), "empty after trimming"));
        }
        if !seen.insert(triplet.id.clone()) {
            return Err(Error::DuplicateId(triplet.id));
        }
        corpus.push(triplet);
    }
    Ok(corpus)
}

/// Reads a corpus file, keeping file order.
pub fn read_corpus(path: impl AsRef<Path>, format: Format) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file), format)
}

fn tsv_check(t: &Triplet) -> Result<()> {
    for f in Field::ALL {
        if t.field(f).contains(['\t', '\n', '\r']) {
            return Err(Error::TsvUnencodable {
                id: t.id.clone(),
                field: f.name(),
            });
        }
    }
    Ok(())
}

/// Serializes a corpus to any writer.
pub fn emit_corpus(corpus: &Corpus, mut out: impl Write, format: Format) -> Result<()> {
    if format == Format::Tsv {
        corpus.iter().try_for_each(tsv_check)?;
    }
    let io = |e| Error::io("<output>", e);
    for t in corpus {
        match format {
            Format::Jsonl => {
                serde_json::to_writer(&mut out, t)?;
                out.write_all(b"\n").map_err(io)?;
            }
            Format::Tsv => writeln!(out, "{}\t{}\t{}", t.src, t.mt, t.pe).map_err(io)?,
        }
    }
    out.flush().map_err(io)
}

/// Writes a corpus file. TSV output fails on texts containing tabs or line breaks.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    if format == Format::Tsv {
        corpus.iter().try_for_each(tsv_check)?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    emit_corpus(corpus, BufWriter::new(file), format).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Size statistics of a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_triplets: usize,
    pub tokens_src: usize,
    pub tokens_mt: usize,
    pub tokens_pe: usize,
    pub chars_src: usize,
    pub chars_mt: usize,
    pub chars_pe: usize,
}

impl CorpusStats {
    fn of_triplet(t: &Triplet) -> Self {
        CorpusStats {
            n_triplets: 1,
            tokens_src: whitespace_token_count(&t.src),
            tokens_mt: whitespace_token_count(&t.mt),
            tokens_pe: whitespace_token_count(&t.pe),
            chars_src: char_len(&t.src),
            chars_mt: char_len(&t.mt),
            chars_pe: char_len(&t.pe),
        }
    }
}

impl Add for CorpusStats {
    type Output = CorpusStats;

    fn add(self, o: CorpusStats) -> CorpusStats {
        CorpusStats {
            n_triplets: self.n_triplets + o.n_triplets,
            tokens_src: self.tokens_src + o.tokens_src,
            tokens_mt: self.tokens_mt + o.tokens_mt,
            tokens_pe: self.tokens_pe + o.tokens_pe,
            chars_src: self.chars_src + o.chars_src,
            chars_mt: self.chars_mt + o.chars_mt,
            chars_pe: self.chars_pe + o.chars_pe,
        }
    }
}

impl AddAssign for CorpusStats {
    fn add_assign(&mut self, o: CorpusStats) {
        *self = *self + o;
    }
}

impl std::iter::Sum for CorpusStats {
    fn sum<I: Iterator<Item = CorpusStats>>(iter: I) -> Self {
        iter.fold(CorpusStats::default(), Add::add)
    }
}

/// Whitespace-token and trimmed-character counts per field.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    corpus.iter().map(CorpusStats::of_triplet).sum()
}
