use std::path::PathBuf;

use apekit_core::analysis::{ter_buckets, BucketAnalysis};
use apekit_core::metrics::{evaluate as score, EvalOptions, MetricReport, Scheme, TokenizerConfig};
use apekit_core::stats::{bootstrap_with, BootstrapMetric, BootstrapResult, DEFAULT_SAMPLES};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::RunManifest;
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TokenizeArg {
    Punct,
    Whitespace,
}

impl From<TokenizeArg> for Scheme {
    fn from(t: TokenizeArg) -> Self {
        match t {
            TokenizeArg::Punct => Scheme::PunctSplit,
            TokenizeArg::Whitespace => Scheme::Whitespace,
        }
    }
}

#[derive(Debug, Args)]
pub struct TokenizerFlags {
    /// Metric-internal tokenization.
    #[arg(long, value_enum, default_value = "punct")]
    pub tokenize: TokenizeArg,
    /// Score TER case-sensitively instead of lowercasing both sides.
    #[arg(long)]
    pub ter_case_sensitive: bool,
}

impl TokenizerFlags {
    fn options(&self) -> EvalOptions {
        let scheme = self.tokenize.into();
        EvalOptions {
            bleu_tokenizer: TokenizerConfig {
                scheme,
                lowercase: false,
            },
            ter_tokenizer: TokenizerConfig {
                scheme,
                lowercase: !self.ter_case_sensitive,
            },
            ..EvalOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Second system; adds a paired bootstrap on BLEU.
    #[arg(long)]
    pub hyp_b: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Include per-sentence scores.
    #[arg(long)]
    pub per_sentence: bool,
    #[command(flatten)]
    pub tok: TokenizerFlags,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Headline numbers in points, plus full-precision detail.
#[derive(Serialize)]
struct SystemScores {
    bleu: f64,
    chrf: f64,
    ter: f64,
    detail: MetricReport,
}

impl From<MetricReport> for SystemScores {
    fn from(r: MetricReport) -> Self {
        SystemScores {
            bleu: r.bleu.score,
            chrf: r.chrf,
            ter: 100.0 * r.ter.score,
            detail: r,
        }
    }
}

#[derive(Serialize)]
struct EvaluateOutput {
    manifest: RunManifest,
    options: EvalOptions,
    segments: usize,
    system: SystemScores,
    #[serde(skip_serializing_if = "Option::is_none")]
    system_b: Option<SystemScores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<BootstrapResult>,
}

pub fn evaluate(args: EvaluateArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("evaluate")?;
    let options = args.tok.options();
    let (hyps, hyp_bytes) = io::read_lines(&args.hyp)?;
    let (refs, ref_bytes) = io::read_lines(&args.reference)?;
    let mut manifest = RunManifest::new("evaluate", &(&options, args.samples))?;
    manifest.input("hyp", &hyp_bytes);
    manifest.input("ref", &ref_bytes);
    let system = score(&hyps, &refs, &options, args.per_sentence)?.into();

    let (system_b, bootstrap) = match &args.hyp_b {
        Some(path) => {
            let (hyps_b, b_bytes) = io::read_lines(path)?;
            manifest.input("hyp_b", &b_bytes);
            manifest.seed("bootstrap", ctx.seed());
            let b = score(&hyps_b, &refs, &options, args.per_sentence)?.into();
            let boot = bootstrap_with(
                BootstrapMetric::Bleu,
                &options.bleu_tokenizer,
                &hyps,
                &hyps_b,
                &refs,
                args.samples,
                ctx.seed(),
            )?;
            (Some(b), Some(boot))
        }
        None => (None, None),
    };
    io::emit_report(
        &EvaluateOutput {
            manifest,
            options,
            segments: refs.len(),
            system,
            system_b,
            bootstrap,
        },
        args.out.as_deref(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Bleu,
    Ter,
}

#[derive(Debug, Args)]
pub struct SignificanceArgs {
    #[arg(long)]
    pub hyp_a: PathBuf,
    #[arg(long)]
    pub hyp_b: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// TER-based testing is an extension; BLEU is the default.
    #[arg(long, value_enum, default_value = "bleu")]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub tok: TokenizerFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SignificanceOutput {
    manifest: RunManifest,
    alpha: f64,
    significant: bool,
    result: BootstrapResult,
}

pub fn significance(args: SignificanceArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("significance")?;
    if !(args.alpha > 0.0 && args.alpha <= 1.0) {
        return Err(CliError::config("--alpha must lie in (0, 1]"));
    }
    let options = args.tok.options();
    let (a, a_bytes) = io::read_lines(&args.hyp_a)?;
    let (b, b_bytes) = io::read_lines(&args.hyp_b)?;
    let (refs, ref_bytes) = io::read_lines(&args.reference)?;
    let (metric, tok) = match args.metric {
        MetricArg::Bleu => (BootstrapMetric::Bleu, options.bleu_tokenizer),
        MetricArg::Ter => (BootstrapMetric::Ter, options.ter_tokenizer),
    };
    if args.samples == 0 {
        return Err(CliError::config("--samples must be at least 1"));
    }
    let result = bootstrap_with(metric, &tok, &a, &b, &refs, args.samples, ctx.seed())?;
    let mut manifest = RunManifest::new("significance", &(metric, tok, args.samples, args.alpha))?;
    manifest.input("hyp_a", &a_bytes);
    manifest.input("hyp_b", &b_bytes);
    manifest.input("ref", &ref_bytes);
    manifest.seed("bootstrap", ctx.seed());
    io::emit_report(
        &SignificanceOutput {
            manifest,
            alpha: args.alpha,
            significant: result.significant(args.alpha),
            result,
        },
        args.out.as_deref(),
    )
}

#[derive(Debug, Args)]
pub struct BucketsArgs {
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long)]
    pub ape: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Directory for `buckets.json` and `buckets.csv`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub tok: TokenizerFlags,
}

#[derive(Serialize)]
struct BucketsOutput {
    manifest: RunManifest,
    analysis: BucketAnalysis,
}

pub fn buckets(args: BucketsArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("buckets")?;
    let tok = args.tok.options().ter_tokenizer;
    let (base, base_bytes) = io::read_lines(&args.baseline)?;
    let (ape, ape_bytes) = io::read_lines(&args.ape)?;
    let (refs, ref_bytes) = io::read_lines(&args.reference)?;
    let analysis = ter_buckets(&base, &ape, &refs, &tok)?;
    let mut manifest = RunManifest::new("buckets", &tok)?;
    manifest.input("baseline", &base_bytes);
    manifest.input("ape", &ape_bytes);
    manifest.input("ref", &ref_bytes);
    io::create_dir(&args.out)?;
    io::write_bytes(&args.out.join("buckets.csv"), analysis.to_csv()?.as_bytes())?;
    io::write_bytes(
        &args.out.join("buckets.json"),
        &io::to_json(&BucketsOutput { manifest, analysis })?,
    )
}
