use std::path::PathBuf;

use apekit_core::transform::{postprocess as restore, preprocess as clean, ChangeLog, CleanTriplet};
use apekit_core::{Corpus, Field};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::{sha256_hex, RunManifest};
use crate::Context;

/// Changelog written by `preprocess` and consumed by `postprocess`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangelogFile {
    pub manifest: RunManifest,
    pub input_digest: String,
    pub cleaned_digest: String,
    /// Digest of every cleaned `(id, src)` pair; outputs must carry the same sources.
    pub source_digest: String,
    pub triplets: usize,
    pub parts_total: usize,
    pub logs: Vec<ChangeLog>,
}

fn source_digest<'a>(rows: impl Iterator<Item = (&'a str, &'a str)>) -> String {
    let mut buf = Vec::new();
    for (id, src) in rows {
        buf.extend_from_slice(id.as_bytes());
        buf.push(b'\t');
        buf.extend_from_slice(src.as_bytes());
        buf.push(b'\n');
    }
    sha256_hex(&buf)
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Cleaned corpus.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub changelog: PathBuf,
}

pub fn preprocess(args: PreprocessArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("preprocess")?;
    let (corpus, bytes) = io::read_corpus_bytes(&args.input, ctx.format)?;
    let mut parts: Vec<CleanTriplet> = Vec::new();
    let mut logs = Vec::with_capacity(corpus.len());
    for t in &corpus {
        let (p, log) = clean(t);
        parts.extend(p);
        logs.push(log);
    }
    let cleaned = corpus.with_triplets(parts.iter().map(CleanTriplet::to_triplet).collect());
    let cleaned_bytes = io::corpus_bytes(&cleaned, ctx.format)?;
    io::write_bytes(&args.out, &cleaned_bytes)?;

    let mut manifest = RunManifest::new("preprocess", &serde_json::json!({}))?;
    manifest.input("corpus", &bytes);
    let file = ChangelogFile {
        manifest,
        input_digest: sha256_hex(&bytes),
        cleaned_digest: sha256_hex(&cleaned_bytes),
        source_digest: source_digest(cleaned.iter().map(|t| (t.id.as_str(), t.src.as_str()))),
        triplets: corpus.len(),
        parts_total: cleaned.len(),
        logs,
    };
    io::write_bytes(&args.changelog, &io::to_json(&file)?)
}

#[derive(Debug, Args)]
pub struct PostprocessArgs {
    /// System outputs: a cleaned corpus, or plain lines with `--lines`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub changelog: PathBuf,
    /// Restored text, one line per original triplet.
    #[arg(long)]
    pub out: PathBuf,
    /// Field to restore.
    #[arg(long, default_value = "mt")]
    pub field: Field,
    /// Read `--in` as one output per line instead of a corpus.
    #[arg(long)]
    pub lines: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct PostprocessOutput {
    manifest: RunManifest,
    field: Field,
    restored: usize,
    irrecoverable: usize,
}

pub fn postprocess(args: PostprocessArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("postprocess")?;
    let log_bytes = io::read_bytes(&args.changelog)?;
    let log: ChangelogFile = serde_json::from_slice(&log_bytes)
        .map_err(|e| CliError::data(format!("{}: {e}", args.changelog.display())))?;

    let (outputs, in_bytes) = if args.lines {
        io::read_lines(&args.input)?
    } else {
        let (corpus, bytes): (Corpus, Vec<u8>) = io::read_corpus_bytes(&args.input, ctx.format)?;
        let digest = source_digest(corpus.iter().map(|t| (t.id.as_str(), t.src.as_str())));
        if digest != log.source_digest {
            return Err(CliError::data(format!(
                "{} does not match the changelog's cleaned corpus",
                args.input.display()
            )));
        }
        (corpus.iter().map(|t| t.field(args.field).to_string()).collect(), bytes)
    };
    if outputs.len() != log.parts_total {
        return Err(CliError::data(format!(
            "changelog expects {} segments, {} has {}",
            log.parts_total,
            args.input.display(),
            outputs.len()
        )));
    }

    let mut restored = Vec::with_capacity(log.logs.len());
    let mut irrecoverable = 0;
    let mut at = 0;
    for entry in &log.logs {
        let r = restore(&outputs[at..at + entry.parts], entry, args.field)?;
        at += entry.parts;
        irrecoverable += r.irrecoverable;
        restored.push(r.text);
    }
    io::write_bytes(&args.out, &io::lines_to_bytes(&restored)?)?;

    let mut manifest = RunManifest::new("postprocess", &serde_json::json!({ "field": args.field, "lines": args.lines }))?;
    manifest.input("changelog", &log_bytes);
    manifest.input("outputs", &in_bytes);
    io::emit_report(
        &PostprocessOutput {
            manifest,
            field: args.field,
            restored: restored.len(),
            irrecoverable,
        },
        args.report.as_deref(),
    )
}
