//! Command implementations behind the `apekit` binary.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for data
//! errors. Reports are pretty-printed JSON with a fixed key order.

pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use apekit_core::Format;
use clap::{Parser, ValueEnum};

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => Format::Jsonl,
            FormatArg::Tsv => Format::Tsv,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "apekit", version, about = "Corpus engineering and evaluation for automatic post-editing")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Corpus file format.
    #[arg(long, global = true, value_enum, default_value = "jsonl")]
    pub format: FormatArg,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: commands::Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub seed: Option<u64>,
    pub format: Format,
    pub config: Option<PathBuf>,
}

impl Context {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Fails for commands that take no configuration file.
    pub fn reject_config(&self, subcommand: &str) -> CliResult<()> {
        match &self.config {
            Some(_) => Err(CliError::config(format!("`{subcommand}` does not take --config"))),
            None => Ok(()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("apekit: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context {
        seed: cli.seed,
        format: cli.format.into(),
        config: cli.config,
    };
    commands::dispatch(cli.command, &ctx)
}
