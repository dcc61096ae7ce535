mod ablate;
mod corpus;
mod evaluate;
mod human;
mod transform;

use clap::Subcommand;

use crate::error::CliResult;
use crate::Context;

pub use ablate::AblateArgs;
pub use corpus::{FilterArgs, MixArgs, StatsArgs};
pub use evaluate::{BucketsArgs, EvaluateArgs, SignificanceArgs, TokenizeArg};
pub use human::CsvArgs;
pub use transform::{ChangelogFile, PostprocessArgs, PreprocessArgs};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ratio filter, normalize, deduplicate, identify languages and split.
    Filter(FilterArgs),
    /// Split subtitle breaks and strip markup, logging every change.
    Preprocess(PreprocessArgs),
    /// Re-insert logged changes into system outputs.
    Postprocess(PostprocessArgs),
    /// Corpus BLEU, chrF and TER, with an optional bootstrap against a second system.
    Evaluate(EvaluateArgs),
    /// Paired bootstrap test between two systems.
    Significance(SignificanceArgs),
    /// Pairwise Cohen's kappa, plain and quadratically weighted.
    Agreement(CsvArgs),
    /// Adequacy means per annotator and system.
    Adequacy(CsvArgs),
    /// Draw data-size samples and aggregate their scores.
    Ablate(AblateArgs),
    /// Delta-TER per bucket of baseline sentence TER.
    Buckets(BucketsArgs),
    /// Corpus size and length statistics.
    Stats(StatsArgs),
    /// Upsample one corpus and mix it with another.
    Mix(MixArgs),
}

pub fn dispatch(command: Command, ctx: &Context) -> CliResult<()> {
    match command {
        Command::Filter(a) => corpus::filter(a, ctx),
        Command::Preprocess(a) => transform::preprocess(a, ctx),
        Command::Postprocess(a) => transform::postprocess(a, ctx),
        Command::Evaluate(a) => evaluate::evaluate(a, ctx),
        Command::Significance(a) => evaluate::significance(a, ctx),
        Command::Agreement(a) => human::agreement(a, ctx),
        Command::Adequacy(a) => human::adequacy(a, ctx),
        Command::Ablate(a) => ablate::ablate(a, ctx),
        Command::Buckets(a) => evaluate::buckets(a, ctx),
        Command::Stats(a) => corpus::stats(a, ctx),
        Command::Mix(a) => corpus::mix(a, ctx),
    }
}
