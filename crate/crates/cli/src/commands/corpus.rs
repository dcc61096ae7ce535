use std::path::PathBuf;

use apekit_core::analysis::upsample_mix;
use apekit_core::filter::{run_filter_pipeline, FilterConfig, FilterReport};
use apekit_core::{Corpus, CorpusStats, Format};
use clap::Args;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::RunManifest;
use crate::Context;

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Directory for the splits and the report.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FilterOutput<'a> {
    manifest: RunManifest,
    config: &'a FilterConfig,
    report: FilterReport,
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Jsonl => "jsonl",
        Format::Tsv => "tsv",
    }
}

pub fn filter(args: FilterArgs, ctx: &Context) -> CliResult<()> {
    let mut config = match &ctx.config {
        Some(p) => io::read_config::<FilterConfig>(p)?,
        None => FilterConfig::default(),
    };
    if let Some(s) = ctx.seed {
        config.seed = s;
    }
    config.validate()?;
    let classifier = config.classifier()?;
    let (corpus, bytes) = io::read_corpus_bytes(&args.input, ctx.format)?;

    let outcome = run_filter_pipeline(&corpus, &config, classifier.as_ref())?;

    io::create_dir(&args.out)?;
    let ext = extension(ctx.format);
    for (name, part) in [
        ("train", &outcome.split.train),
        ("dev", &outcome.split.dev),
        ("test", &outcome.split.test),
    ] {
        io::write_bytes(&args.out.join(format!("{name}.{ext}")), &io::corpus_bytes(part, ctx.format)?)?;
    }
    let removed = Corpus::from_triplets(
        outcome
            .removed
            .iter()
            .map(|r| {
                let mut t = r.triplet.clone();
                let reason = serde_json::to_value(r.reason).map_err(CliError::data)?;
                t.set_meta("removal_reason", reason.as_str().unwrap_or_default());
                Ok(t)
            })
            .collect::<CliResult<Vec<_>>>()?,
    );
    io::write_bytes(&args.out.join("removed.jsonl"), &io::corpus_bytes(&removed, Format::Jsonl)?)?;

    let mut manifest = RunManifest::new("filter", &config)?;
    manifest.input("corpus", &bytes);
    manifest.seed("split", config.seed);
    let report = FilterOutput {
        manifest,
        config: &config,
        report: outcome.report,
    };
    io::write_bytes(&args.out.join("filter_report.json"), &io::to_json(&report)?)
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct StatsOutput {
    manifest: RunManifest,
    stats: CorpusStats,
}

pub fn stats(args: StatsArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("stats")?;
    let (corpus, bytes) = io::read_corpus_bytes(&args.input, ctx.format)?;
    let mut manifest = RunManifest::new("stats", &serde_json::json!({}))?;
    manifest.input("corpus", &bytes);
    io::emit_report(
        &StatsOutput {
            manifest,
            stats: corpus.stats(),
        },
        args.out.as_deref(),
    )
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Corpus to upsample.
    #[arg(long)]
    pub a: PathBuf,
    /// Corpus appended once.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub factor: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct MixOutput {
    manifest: RunManifest,
    factor: usize,
    a: usize,
    b: usize,
    total: usize,
}

pub fn mix(args: MixArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("mix")?;
    if args.factor == 0 {
        return Err(CliError::config("--factor must be at least 1"));
    }
    let (a, a_bytes) = io::read_corpus_bytes(&args.a, ctx.format)?;
    let (b, b_bytes) = io::read_corpus_bytes(&args.b, ctx.format)?;
    let mixed = upsample_mix(&a, args.factor, &b, ctx.seed())?;
    io::write_bytes(&args.out, &io::corpus_bytes(&mixed, ctx.format)?)?;
    let mut manifest = RunManifest::new("mix", &serde_json::json!({ "factor": args.factor }))?;
    manifest.input("a", &a_bytes);
    manifest.input("b", &b_bytes);
    manifest.seed("shuffle", ctx.seed());
    io::emit_report(
        &MixOutput {
            manifest,
            factor: args.factor,
            a: a.len(),
            b: b.len(),
            total: mixed.len(),
        },
        args.report.as_deref(),
    )
}
