use std::path::PathBuf;

use apekit_core::stats::{
    adequacy_summary, pairwise_average_kappa, AdequacySummary, AdequacyTable, PairwiseAgreement, Weighting,
    ADEQUACY_SCALE,
};
use clap::Args;
use serde::Serialize;

use crate::error::CliResult;
use crate::io;
use crate::manifest::RunManifest;
use crate::Context;

#[derive(Debug, Args)]
pub struct CsvArgs {
    /// Ratings with columns annotator_id, item_id, system, score.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load(args: &CsvArgs, subcommand: &str) -> CliResult<(AdequacyTable, RunManifest)> {
    let bytes = io::read_bytes(&args.input)?;
    let table = AdequacyTable::from_csv(bytes.as_slice())?;
    let mut manifest = RunManifest::new(subcommand, &serde_json::json!({ "scale": ADEQUACY_SCALE }))?;
    manifest.input("ratings", &bytes);
    Ok((table, manifest))
}

#[derive(Serialize)]
struct AgreementOutput {
    manifest: RunManifest,
    annotators: Vec<String>,
    ratings_per_annotator: usize,
    unweighted: PairwiseAgreement,
    quadratic: PairwiseAgreement,
}

pub fn agreement(args: CsvArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("agreement")?;
    let (table, manifest) = load(&args, "agreement")?;
    let (names, cols) = table.rating_columns();
    let unweighted = pairwise_average_kappa(&names, &cols, Weighting::None, ADEQUACY_SCALE)?;
    let quadratic = pairwise_average_kappa(&names, &cols, Weighting::Quadratic, ADEQUACY_SCALE)?;
    io::emit_report(
        &AgreementOutput {
            manifest,
            ratings_per_annotator: cols.first().map_or(0, Vec::len),
            annotators: names,
            unweighted,
            quadratic,
        },
        args.out.as_deref(),
    )
}

#[derive(Serialize)]
struct AdequacyOutput {
    manifest: RunManifest,
    summary: AdequacySummary,
}

pub fn adequacy(args: CsvArgs, ctx: &Context) -> CliResult<()> {
    ctx.reject_config("adequacy")?;
    let (table, manifest) = load(&args, "adequacy")?;
    io::emit_report(
        &AdequacyOutput {
            manifest,
            summary: adequacy_summary(&table),
        },
        args.out.as_deref(),
    )
}
