//! The `disfluent-align` command line: `align`, `oer`, `synth`, `eval` and
//! `ablate`.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for unreadable or
//! malformed inputs, 3 when an utterance cannot be aligned at all. Batch
//! commands skip failing utterances and log them. They finish the rest, then
//! exit with 2 if any skipped input was malformed and 3 otherwise.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::Error;

pub use commands::{read_transcripts, run_command, Outcome};
pub use config::{ArcClass, Overrides, RunConfig, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(name = "disfluent-align", version, about = "Forced alignment that tolerates untranscribed disfluencies")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align emission matrices to transcripts.
    Align {
        #[command(flatten)]
        input: Inputs,
        /// Directory for `<id>.align.tsv` files and `records.jsonl`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Oracle error rate and the resulting beta, one JSON line per utterance.
    Oer {
        #[command(flatten)]
        input: Inputs,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a planted-truth corpus from reference alignments.
    Synth {
        /// Directory of `<id>.tsv` reference alignments.
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score alignments against a corpus's verbatim references.
    Eval {
        /// Directory of `<id>.align.tsv` files.
        #[arg(long)]
        pred: PathBuf,
        /// Corpus directory holding the manifest and verbatim references.
        #[arg(long)]
        refs: PathBuf,
        /// Manifest path; defaults to `manifest.jsonl` under `--refs`.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Alignments of the same method on verbatim transcripts; adds
        /// relative reductions.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Also break reductions down by disfluency rate (needs `--baseline`).
        #[arg(long)]
        severity: bool,
        /// Directory for `metrics.json` and `metrics.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seven arc-ablation configurations over a corpus.
    Ablate {
        /// Corpus directory written by `synth`.
        #[arg(long)]
        corpus: PathBuf,
        /// Directory for `ablation.json` and `ablation.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Utterances given either as a corpus directory or as emission files plus a
/// transcript file.
#[derive(Debug, Clone, clap::Args)]
pub struct Inputs {
    /// Corpus directory; aligns every utterance's approximate transcript.
    #[arg(long, conflicts_with_all = ["emissions", "transcript"])]
    pub corpus: Option<PathBuf>,
    /// With `--corpus`, use the verbatim transcripts instead; the usual
    /// baseline for `eval --baseline`.
    #[arg(long, requires = "corpus")]
    pub verbatim: bool,
    /// EMIS files; the utterance id is the file name up to its first dot.
    #[arg(long, num_args = 1.., requires = "transcript")]
    pub emissions: Vec<PathBuf>,
    /// One transcript per line, words separated by `|`, optionally prefixed
    /// by `id<TAB>`.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FORMAT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_infeasible() => EXIT_INFEASIBLE,
        Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_FORMAT,
    }
}

/// Parses `args` and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run_command(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
