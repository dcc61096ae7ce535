//! Adequacy ratings: CSV ingestion and per-annotator aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Nmt,
    Ape,
    Human,
}

impl System {
    pub const ALL: [System; 3] = [System::Nmt, System::Ape, System::Human];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            System::Nmt => "nmt",
            System::Ape => "ape",
            System::Human => "human",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nmt" => Ok(System::Nmt),
            "ape" => Ok(System::Ape),
            "human" => Ok(System::Human),
            _ => Err(format!("unknown system `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Score {
    Rated(u8),
    CantDecide,
}

impl FromStr for Score {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "X" | "x" => Ok(Score::CantDecide),
            _ => match s.parse::<u8>() {
                Ok(v @ 1..=5) => Ok(Score::Rated(v)),
                _ => Err(format!("score `{s}` is not 1-5 or X")),
            },
        }
    }
}

impl Score {
    pub fn value(self) -> Option<i64> {
        match self {
            Score::Rated(v) => Some(v as i64),
            Score::CantDecide => None,
        }
    }
}

/// Scores per annotator, item and system.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdequacyTable {
    pub annotators: BTreeMap<String, BTreeMap<String, [Option<Score>; 3]>>,
}

#[derive(Debug, Deserialize)]
struct Row {
    annotator_id: String,
    item_id: String,
    system: String,
    score: String,
}

impl AdequacyTable {
    /// Reads `annotator_id,item_id,system,score` rows. Every malformed row is
    /// reported with its line number; items missing a system are rejected too.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut bad: Vec<(usize, String)> = Vec::new();
        let mut table = AdequacyTable::default();
        let mut first_line: BTreeMap<(String, String), usize> = BTreeMap::new();
        // Items with a rejected row; their gaps are not reported twice.
        let mut tainted: BTreeSet<(String, String)> = BTreeSet::new();
        let headers = rdr.headers().map_err(|e| Error::MalformedRows(vec![(1, e.kind_message())]))?.clone();
        for rec in rdr.records() {
            let (line, row) = match rec {
                Ok(r) => {
                    let line = r.position().map_or(0, |p| p.line() as usize);
                    match r.deserialize::<Row>(Some(&headers)) {
                        Ok(row) => (line, row),
                        Err(e) => {
                            bad.push((line, e.kind_message()));
                            continue;
                        }
                    }
                }
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    bad.push((line, e.kind_message()));
                    continue;
                }
            };
            let parsed = row
                .system
                .parse::<System>()
                .and_then(|s| row.score.parse::<Score>().map(|v| (s, v)));
            let (system, score) = match parsed {
                Ok(p) => p,
                Err(m) => {
                    tainted.insert((row.annotator_id, row.item_id));
                    bad.push((line, m));
                    continue;
                }
            };
            if row.annotator_id.is_empty() || row.item_id.is_empty() {
                bad.push((line, "empty annotator or item id".into()));
                continue;
            }
            first_line
                .entry((row.annotator_id.clone(), row.item_id.clone()))
                .or_insert(line);
            let slot = &mut table
                .annotators
                .entry(row.annotator_id)
                .or_default()
                .entry(row.item_id)
                .or_default()[system.index()];
            if slot.is_some() {
                bad.push((line, format!("duplicate {system} score")));
                continue;
            }
            *slot = Some(score);
        }
        for (ann, items) in &table.annotators {
            for (item, scores) in items {
                let key = (ann.clone(), item.clone());
                if scores.iter().any(Option::is_none) && !tainted.contains(&key) {
                    let line = first_line[&key];
                    bad.push((line, format!("annotator `{ann}` item `{item}` lacks a system")));
                }
            }
        }
        if !bad.is_empty() {
            bad.sort();
            return Err(Error::MalformedRows(bad));
        }
        Ok(table)
    }

    /// Annotator names and one rating column per annotator over the union of
    /// `(item, system)` keys. Missing and undecided ratings are `None`.
    pub fn rating_columns(&self) -> (Vec<String>, Vec<Vec<Option<i64>>>) {
        let mut keys: Vec<(&str, System)> = self
            .annotators
            .values()
            .flat_map(|items| items.keys().flat_map(|i| System::ALL.map(|s| (i.as_str(), s))))
            .collect();
        keys.sort();
        keys.dedup();
        let names = self.annotators.keys().cloned().collect();
        let cols = self
            .annotators
            .values()
            .map(|items| {
                keys.iter()
                    .map(|(item, s)| items.get(*item).and_then(|sc| sc[s.index()]).and_then(Score::value))
                    .collect()
            })
            .collect();
        (names, cols)
    }
}

trait KindMessage {
    fn kind_message(&self) -> String;
}

impl KindMessage for csv::Error {
    fn kind_message(&self) -> String {
        match self.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                format!("expected {expected_len} columns, found {len}")
            }
            _ => self.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemMeans {
    pub nmt: Option<f64>,
    pub ape: Option<f64>,
    pub human: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyRow {
    pub annotator: String,
    pub used: usize,
    pub assigned: usize,
    /// `used / assigned`.
    pub evaluations: String,
    pub means: SystemMeans,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacySummary {
    pub annotators: Vec<AdequacyRow>,
    /// Pools every used evaluation; not a mean of the annotator means.
    pub overall: AdequacyRow,
}

#[derive(Default)]
struct Acc {
    used: usize,
    assigned: usize,
    sums: [u64; 3],
}

impl Acc {
    fn add(&mut self, scores: &[Option<Score>; 3]) {
        self.assigned += 1;
        let vals: Option<Vec<i64>> = scores.iter().map(|s| s.and_then(Score::value)).collect();
        if let Some(vals) = vals {
            self.used += 1;
            for (sum, v) in self.sums.iter_mut().zip(vals) {
                *sum += v as u64;
            }
        }
    }

    fn row(&self, annotator: &str) -> AdequacyRow {
        let mean = |k: usize| (self.used > 0).then(|| self.sums[k] as f64 / self.used as f64);
        AdequacyRow {
            annotator: annotator.to_string(),
            used: self.used,
            assigned: self.assigned,
            evaluations: format!("{} / {}", self.used, self.assigned),
            means: SystemMeans {
                nmt: mean(0),
                ape: mean(1),
                human: mean(2),
            },
        }
    }
}

/// Means per system per annotator. An item counts only when none of its three
/// scores is "can't decide".
pub fn adequacy_summary(table: &AdequacyTable) -> AdequacySummary {
    let mut overall = Acc::default();
    let annotators = table
        .annotators
        .iter()
        .map(|(name, items)| {
            let mut acc = Acc::default();
            for scores in items.values() {
                acc.add(scores);
                overall.add(scores);
            }
            acc.row(name)
        })
        .collect();
    AdequacySummary {
        annotators,
        overall: overall.row("overall"),
    }
}
