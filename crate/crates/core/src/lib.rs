//! Weakly-supervised forced alignment of disfluent speech.
//!
//! Frame-level phone log-posteriors are aligned to an approximate phonetic
//! transcription by composing a CTC topology, a transcript acceptor and an
//! emission graph, then taking the shortest path. The transcript acceptor may
//! be augmented with epsilon arcs that let the alignment repeat words, phrases
//! and word prefixes, or skip words, so untranscribed disfluencies no longer
//! derail the alignment. How freely those arcs may be used is set per
//! utterance from its oracle error rate.
//!
//! The crate is organised as:
//!
//! - [`wfst`]: tropical-semiring transducers, composition, trimming and
//!   shortest path.
//! - [`graphs`]: phone vocabulary, transcripts, emission matrices and the
//!   graph builders (linear and modified transcript acceptors, CTC topology,
//!   emission graph, biased bigram grammar).
//! - [`align`]: end-to-end alignment, path decoding, oracle error rate and the
//!   adaptive weighting rule, plus an independent trellis aligner.
//! - [`synth`]: reference alignments, synthetic emissions and the disfluency
//!   corruptor used to build planted-truth corpora.
//! - [`eval`]: boundary precision/recall/F1/R-value, frame overlap and
//!   relative reductions.
//! - [`experiment`]: corpus-level runs (ablations, severity breakdown).
//! - [`cli`]: the `disfluent-align` command-line front end.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod align;
pub mod cli;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod graphs;
pub mod synth;
pub mod wfst;

pub use error::{Error, Result};
