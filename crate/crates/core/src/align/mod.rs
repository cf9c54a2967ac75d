//! End-to-end alignment: graph construction, decoding and the per-utterance
//! choice of how cheaply the alignment may deviate from its transcript.

mod alignment;
mod io;
mod oer;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use alignment::{ctc_collapse, decode_path, Alignment, Event, Segment, WordSegment};
pub use io::{parse_alignment_tsv, AlignmentRecord, ParsedAlignment};
pub use oer::{adaptive_beta, compute_oer, edit_distance, OerResult};
pub use oracle::viterbi_oracle;

use crate::error::{Error, Result};
use crate::graphs::{
    build_ctc_topology, build_emission_graph, build_linear_fsa, build_modified_fsa, check_vocab, ArcClasses,
    EventLabels, LogProbMatrix, ModifiedFsaOptions, PhoneTranscript, PhoneVocab, DEFAULT_ADD_K,
    DEFAULT_MAX_PHRASE_WORDS,
};
use crate::wfst::{compose, shortest_path, trim, Fst};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Plain transcript chain.
    Linear,
    /// Transcript acceptor with disfluency arcs.
    #[serde(rename = "ws")]
    WeaklySupervised,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::WeaklySupervised => "ws",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Mode::Linear),
            "ws" => Ok(Mode::WeaklySupervised),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}` (expected linear or ws)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How `beta` is chosen for the disfluency arcs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BetaRepr", into = "BetaRepr")]
pub enum BetaPolicy {
    Fixed(f64),
    /// Per utterance from its oracle error rate.
    Adaptive,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BetaRepr {
    Value(f64),
    Text(String),
}

impl From<BetaPolicy> for BetaRepr {
    fn from(b: BetaPolicy) -> Self {
        match b {
            BetaPolicy::Fixed(v) if v.is_finite() => BetaRepr::Value(v),
            other => BetaRepr::Text(other.to_string()),
        }
    }
}

impl TryFrom<BetaRepr> for BetaPolicy {
    type Error = Error;

    fn try_from(r: BetaRepr) -> Result<Self> {
        match r {
            BetaRepr::Value(v) => BetaPolicy::fixed(v),
            BetaRepr::Text(s) => s.parse(),
        }
    }
}

impl BetaPolicy {
    pub fn fixed(beta: f64) -> Result<Self> {
        if beta >= 0.0 {
            Ok(BetaPolicy::Fixed(beta))
        } else {
            Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")))
        }
    }
}

impl FromStr for BetaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(BetaPolicy::Adaptive),
            "inf" | "+inf" => Ok(BetaPolicy::Fixed(f64::INFINITY)),
            _ => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("beta `{s}` is neither a number nor `adaptive`")))?;
                BetaPolicy::fixed(v)
            }
        }
    }
}

impl fmt::Display for BetaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaPolicy::Adaptive => f.write_str("adaptive"),
            BetaPolicy::Fixed(v) if v.is_infinite() => f.write_str("inf"),
            BetaPolicy::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignConfig {
    pub mode: Mode,
    pub beta: BetaPolicy,
    pub max_phrase_words: usize,
    pub arcs: ArcClasses,
    pub add_k: f64,
    pub lm_scale: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            mode: Mode::WeaklySupervised,
            beta: BetaPolicy::Adaptive,
            max_phrase_words: DEFAULT_MAX_PHRASE_WORDS,
            arcs: ArcClasses::default(),
            add_k: DEFAULT_ADD_K,
            lm_scale: 1.0,
        }
    }
}

impl AlignConfig {
    pub fn linear() -> Self {
        AlignConfig { mode: Mode::Linear, ..AlignConfig::default() }
    }

    pub fn weakly_supervised(beta: BetaPolicy) -> Self {
        AlignConfig { mode: Mode::WeaklySupervised, beta, ..AlignConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlignOutput {
    pub alignment: Alignment,
    /// `None` in linear mode.
    pub beta: Option<f64>,
    /// Present when the weight was chosen adaptively.
    pub oer: Option<OerResult>,
}

/// Aligner for one vocabulary and configuration. Holds the CTC topology so it
/// is built once per batch.
#[derive(Clone, Debug)]
pub struct Aligner {
    vocab: PhoneVocab,
    topology: Fst,
    config: AlignConfig,
}

impl Aligner {
    pub fn new(vocab: PhoneVocab, config: AlignConfig) -> Result<Self> {
        let topology = build_ctc_topology(&vocab)?;
        Ok(Aligner { vocab, topology, config })
    }

    pub fn vocab(&self) -> &PhoneVocab {
        &self.vocab
    }

    pub fn config(&self) -> &AlignConfig {
        &self.config
    }

    pub fn topology(&self) -> &Fst {
        &self.topology
    }

    /// Same vocabulary and topology, different configuration.
    pub fn with_config(&self, config: AlignConfig) -> Self {
        Aligner { vocab: self.vocab.clone(), topology: self.topology.clone(), config }
    }

    pub fn oer(&self, e: &LogProbMatrix, y: &PhoneTranscript) -> Result<OerResult> {
        compute_oer(e, y, &self.vocab, &self.topology, self.config.add_k, self.config.lm_scale)
    }

    /// Aligns with the configured mode and beta policy.
    pub fn align(&self, e: &LogProbMatrix, y: &PhoneTranscript) -> Result<AlignOutput> {
        match (self.config.mode, self.config.beta) {
            (Mode::Linear, _) => Ok(AlignOutput { alignment: self.align_linear(e, y)?, beta: None, oer: None }),
            (Mode::WeaklySupervised, BetaPolicy::Fixed(beta)) => {
                Ok(AlignOutput { alignment: self.align_with_beta(e, y, beta)?, beta: Some(beta), oer: None })
            }
            (Mode::WeaklySupervised, BetaPolicy::Adaptive) => {
                let oer = self.oer(e, y)?;
                let beta = adaptive_beta(&oer);
                Ok(AlignOutput { alignment: self.align_with_beta(e, y, beta)?, beta: Some(beta), oer: Some(oer) })
            }
        }
    }

    /// Alignment against the plain transcript chain.
    pub fn align_linear(&self, e: &LogProbMatrix, y: &PhoneTranscript) -> Result<Alignment> {
        check_vocab(e, &self.vocab)?;
        if e.frames() < y.min_frames() {
            return Err(Error::Infeasible { needed: y.min_frames(), available: e.frames() });
        }
        let ty = trim(&compose(&self.topology, &build_linear_fsa(y, &self.vocab)?)?);
        self.decode(e, y, &ty)
    }

    /// Alignment against the disfluency-aware acceptor at a fixed `beta`,
    /// with the configured arc classes.
    pub fn align_with_beta(&self, e: &LogProbMatrix, y: &PhoneTranscript, beta: f64) -> Result<Alignment> {
        check_vocab(e, &self.vocab)?;
        let opts = ModifiedFsaOptions { beta, max_phrase_words: self.config.max_phrase_words, arcs: self.config.arcs };
        let ty = trim(&compose(&self.topology, &build_modified_fsa(y, &self.vocab, &opts)?)?);
        self.decode(e, y, &ty)
    }

    fn decode(&self, e: &LogProbMatrix, y: &PhoneTranscript, ty: &Fst) -> Result<Alignment> {
        let emissions = build_emission_graph(e, &self.vocab)?;
        let graph = trim(&compose(&emissions, ty)?);
        let path = shortest_path(&graph).map_err(|err| match err {
            Error::EmptyLanguage if e.frames() < y.min_frames() => {
                Error::Infeasible { needed: y.min_frames(), available: e.frames() }
            }
            other => other,
        })?;
        let labels = EventLabels::new(&self.vocab, self.config.max_phrase_words);
        decode_path(&path, &self.vocab, y, &labels, e.frames(), e.frame_shift_ms())
    }
}

/// One-shot alignment; builds the topology on every call.
pub fn force_align(
    e: &LogProbMatrix,
    y: &PhoneTranscript,
    vocab: &PhoneVocab,
    config: &AlignConfig,
) -> Result<AlignOutput> {
    Aligner::new(vocab.clone(), *config)?.align(e, y)
}
