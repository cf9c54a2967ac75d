//! Phone vocabulary, transcripts, emission matrices and the graphs built from
//! them.
//!
//! An alignment graph is `E ∘ (T ∘ Y)`: the emission graph `E` of one
//! utterance, the CTC topology `T`, and a transcript acceptor `Y` which is
//! either the plain linear chain or the modified acceptor with disfluency
//! arcs. The biased bigram grammar replaces `Y` when estimating how far the
//! audio strays from its transcript.

mod bigram;
mod emission_graph;
mod emissions;
mod linear;
mod modified;
mod topology;
mod transcript;
mod vocab;

pub use bigram::{build_biased_bigram, BigramCounts, DEFAULT_ADD_K};
pub use emission_graph::build_emission_graph;
pub(crate) use emission_graph::check_vocab;
pub use emissions::{log_sum_exp, Ingest, LogProbMatrix, ROW_TOLERANCE};
pub use linear::build_linear_fsa;
pub use modified::{
    backbone_cost, build_modified_fsa, epsilon_cost, split_epsilon_cost, ArcClasses, EventKind, EventLabels,
    ModifiedFsaOptions, DEFAULT_MAX_PHRASE_WORDS,
};
pub use topology::build_ctc_topology;
pub use transcript::PhoneTranscript;
pub use vocab::{PhoneVocab, CMU_PHONES, PAD, SIL, UNK};
