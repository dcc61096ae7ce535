use std::collections::BTreeSet;
use std::path::PathBuf;

use apekit_core::analysis::{curve_report, draw_samples, run_protocol, CurveReport, MockScorer, SampleSpec};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::{sha256_hex, RunManifest};
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerArg {
    /// Deterministic stand-in for training and scoring a model.
    Mock,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Ascending sample sizes; `--config` may give a full sample spec instead.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Score the samples with a built-in scorer.
    #[arg(long, value_enum, conflicts_with = "results")]
    pub scorer: Option<ScorerArg>,
    /// CSV of externally produced scores: size, replicate, value.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Reference score drawn as a horizontal line.
    #[arg(long)]
    pub baseline: Option<f64>,
    #[arg(long, default_value = "bleu")]
    pub metric: String,
}

#[derive(Serialize)]
struct SampleEntry {
    size: usize,
    replicate: usize,
    seed: u64,
    file: String,
    digest: String,
}

#[derive(Serialize)]
struct SamplesOutput<'a> {
    manifest: RunManifest,
    spec: &'a SampleSpec,
    samples: Vec<SampleEntry>,
}

#[derive(Serialize)]
struct CurveOutput {
    manifest: RunManifest,
    results: Vec<ResultRow>,
    curve: CurveReport,
}

#[derive(Serialize)]
struct ResultRow {
    size: usize,
    replicate: usize,
    value: f64,
}

fn read_results(path: &std::path::Path) -> CliResult<(Vec<(usize, usize, f64)>, Vec<u8>)> {
    let bytes = io::read_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<(usize, usize, f64)>() {
        rows.push(rec.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?);
    }
    Ok((rows, bytes))
}

pub fn ablate(args: AblateArgs, ctx: &Context) -> CliResult<()> {
    let mut spec = match &ctx.config {
        Some(p) => io::read_config::<SampleSpec>(p)?,
        None => SampleSpec::new(Vec::new(), apekit_core::analysis::sampling::DEFAULT_REPLICATES, 0),
    };
    if !args.sizes.is_empty() {
        spec.sizes = args.sizes.clone();
    }
    if let Some(r) = args.replicates {
        spec.replicates = r;
    }
    if let Some(s) = ctx.seed {
        spec.base_seed = s;
    }
    spec.validate()?;

    let (corpus, bytes) = io::read_corpus_bytes(&args.input, ctx.format)?;
    let samples = draw_samples(&corpus, &spec)?;

    let ext = match ctx.format {
        apekit_core::Format::Jsonl => "jsonl",
        apekit_core::Format::Tsv => "tsv",
    };
    let dir = args.out.join("samples");
    io::create_dir(&dir)?;
    let mut entries = Vec::with_capacity(samples.len());
    for s in &samples {
        let name = format!("size{}_rep{}.{ext}", s.size, s.replicate);
        let data = io::corpus_bytes(&s.corpus, ctx.format)?;
        io::write_bytes(&dir.join(&name), &data)?;
        entries.push(SampleEntry {
            size: s.size,
            replicate: s.replicate,
            seed: s.seed,
            file: format!("samples/{name}"),
            digest: sha256_hex(&data),
        });
    }
    let manifest = || -> CliResult<RunManifest> {
        let mut m = RunManifest::new("ablate", &spec)?;
        m.input("corpus", &bytes);
        m.seed("base", spec.base_seed);
        Ok(m)
    };
    io::write_bytes(
        &args.out.join("samples.json"),
        &io::to_json(&SamplesOutput {
            manifest: manifest()?,
            spec: &spec,
            samples: entries,
        })?,
    )?;

    let (results, curve, mut m) = match (&args.scorer, &args.results) {
        (Some(ScorerArg::Mock), _) => {
            let scorer = MockScorer {
                seed: spec.base_seed,
                ..MockScorer::default()
            };
            let (results, curve) = run_protocol(&samples, &scorer, &args.metric, args.baseline)?;
            (results, curve, manifest()?)
        }
        (None, Some(path)) => {
            let (results, raw) = read_results(path)?;
            let drawn: BTreeSet<(usize, usize)> = samples.iter().map(|s| (s.size, s.replicate)).collect();
            if let Some(r) = results.iter().find(|r| !drawn.contains(&(r.0, r.1))) {
                return Err(CliError::data(format!("result for size {} replicate {} matches no sample", r.0, r.1)));
            }
            let curve = curve_report(&args.metric, &results, args.baseline)?;
            let mut m = manifest()?;
            m.input("results", &raw);
            (results, curve, m)
        }
        (None, None) => return Ok(()),
    };
    m.seed("scorer", spec.base_seed);
    io::write_bytes(&args.out.join("curve.csv"), curve.to_csv()?.as_bytes())?;
    io::write_bytes(
        &args.out.join("curve.json"),
        &io::to_json(&CurveOutput {
            manifest: m,
            results: results
                .into_iter()
                .map(|(size, replicate, value)| ResultRow { size, replicate, value })
                .collect(),
            curve,
        })?,
    )
}
