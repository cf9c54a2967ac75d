use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::align::{AlignConfig, BetaPolicy, Mode};
use crate::error::{Error, Result};
use crate::eval::{EvalOptions, Level, Matching};
use crate::graphs::{ArcClasses, PhoneVocab, DEFAULT_MAX_PHRASE_WORDS};
use crate::synth::{CorpusOptions, CorruptOptions, DEFAULT_FRAME_SHIFT_MS, DEFAULT_PEAK};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "DISFLUENT_ALIGN_CONFIG";

/// Disfluency arc classes that can be switched off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum ArcClass {
    W,
    D,
    PW,
}

/// Everything a run depends on. Serialises to TOML; command-line flags
/// override individual fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Symbol table, one token per line; the built-in CMU table when absent.
    pub vocab: Option<PathBuf>,
    pub frame_shift_ms: f64,
    pub mode: Mode,
    pub beta: BetaPolicy,
    pub level: Level,
    /// Defaults to 40 ms for phones and 100 ms for words.
    pub tolerance_ms: Option<f64>,
    pub matching: Matching,
    pub max_phrase_words: usize,
    pub add_k: f64,
    pub lm_scale: f64,
    pub seed: u64,
    /// 0 uses every core.
    pub workers: usize,
    pub disable_arcs: Vec<ArcClass>,
    pub peak: f64,
    pub clean_fraction: f64,
    /// Candidate disfluency rates, in tenths.
    pub rates: Vec<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let align = AlignConfig::default();
        RunConfig {
            vocab: None,
            frame_shift_ms: DEFAULT_FRAME_SHIFT_MS,
            mode: align.mode,
            beta: align.beta,
            level: Level::Phone,
            tolerance_ms: None,
            matching: Matching::Greedy,
            max_phrase_words: DEFAULT_MAX_PHRASE_WORDS,
            add_k: align.add_k,
            lm_scale: align.lm_scale,
            seed: 0,
            workers: 0,
            disable_arcs: Vec::new(),
            peak: DEFAULT_PEAK,
            clean_fraction: 0.0,
            rates: CorruptOptions::default().rate_tenths,
        }
    }
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Symbol table, one token per line (default: built-in CMU table).
    #[arg(long, global = true)]
    pub vocab: Option<PathBuf>,
    /// `linear` or `ws`.
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// A value >= 0, `inf`, or `adaptive`.
    #[arg(long, global = true)]
    pub beta: Option<BetaPolicy>,
    /// `phone` or `word`.
    #[arg(long, global = true)]
    pub level: Option<Level>,
    /// Boundary tolerance (default 40 for phones, 100 for words).
    #[arg(long, global = true)]
    pub tolerance_ms: Option<f64>,
    #[arg(long, global = true)]
    pub frame_shift_ms: Option<f64>,
    /// `greedy` or `nearest`.
    #[arg(long, global = true)]
    pub matching: Option<Matching>,
    /// Longest phrase a repetition arc may jump back over, in words.
    #[arg(long, global = true)]
    pub max_phrase_words: Option<usize>,
    /// Add-k smoothing of the oracle bigram.
    #[arg(long, global = true)]
    pub add_k: Option<f64>,
    /// Weight of the oracle bigram against the emissions.
    #[arg(long, global = true)]
    pub lm_scale: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Disfluency arc classes to leave out.
    #[arg(long, global = true, value_enum, num_args = 1.., ignore_case = true)]
    pub disable_arcs: Option<Vec<ArcClass>>,
    /// Probability on the reference label in synthetic emissions.
    #[arg(long, global = true)]
    pub peak: Option<f64>,
    /// Share of synthetic utterances left fluent.
    #[arg(long, global = true)]
    pub clean_fraction: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// The file named by `--config` (or the environment), then the flags.
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let mut c = match &o.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        c.apply(o);
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &o.$f { self.$f = v.clone(); })* };
        }
        set!(mode, beta, level, frame_shift_ms, matching, max_phrase_words, add_k, lm_scale, seed, workers);
        set!(disable_arcs, peak, clean_fraction);
        if o.vocab.is_some() {
            self.vocab = o.vocab.clone();
        }
        if o.tolerance_ms.is_some() {
            self.tolerance_ms = o.tolerance_ms;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.frame_shift_ms > 0.0 && self.frame_shift_ms.is_finite()) {
            return bad(format!("frame_shift_ms must be positive, got {}", self.frame_shift_ms));
        }
        if let Some(t) = self.tolerance_ms {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("tolerance_ms must be >= 0, got {t}"));
            }
        }
        if self.max_phrase_words == 0 {
            return bad("max_phrase_words must be at least 1".into());
        }
        if !(self.add_k > 0.0 && self.add_k.is_finite()) {
            return bad(format!("add_k must be positive, got {}", self.add_k));
        }
        if !(self.lm_scale >= 0.0 && self.lm_scale.is_finite()) {
            return bad(format!("lm_scale must be >= 0, got {}", self.lm_scale));
        }
        if !(self.peak > 0.5 && self.peak < 1.0) {
            return bad(format!("peak must lie in (0.5, 1), got {}", self.peak));
        }
        if !(0.0..=1.0).contains(&self.clean_fraction) {
            return bad(format!("clean_fraction must lie in [0, 1], got {}", self.clean_fraction));
        }
        if self.rates.is_empty() || self.rates.iter().any(|&r| r == 0 || r > 10) {
            return bad(format!("rates must be tenths in 1..=10, got {:?}", self.rates));
        }
        if let BetaPolicy::Fixed(b) = self.beta {
            if b.is_nan() || b < 0.0 {
                return bad(format!("beta must be >= 0, got {b}"));
            }
        }
        Ok(())
    }

    pub fn load_vocab(&self) -> Result<PhoneVocab> {
        match &self.vocab {
            Some(p) => PhoneVocab::load(p),
            None => Ok(PhoneVocab::cmu()),
        }
    }

    pub fn arcs(&self) -> ArcClasses {
        ArcClasses {
            word_repeat: !self.disable_arcs.contains(&ArcClass::W),
            deletion: !self.disable_arcs.contains(&ArcClass::D),
            part_word: !self.disable_arcs.contains(&ArcClass::PW),
        }
    }

    pub fn align_config(&self) -> AlignConfig {
        AlignConfig {
            mode: self.mode,
            beta: self.beta,
            max_phrase_words: self.max_phrase_words,
            arcs: self.arcs(),
            add_k: self.add_k,
            lm_scale: self.lm_scale,
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        let mut e = EvalOptions::for_level(self.level);
        e.frame_shift_ms = self.frame_shift_ms;
        e.matching = self.matching;
        if let Some(t) = self.tolerance_ms {
            e.tolerance_ms = t;
        }
        e
    }

    pub fn corpus_options(&self) -> CorpusOptions {
        CorpusOptions {
            seed: self.seed,
            clean_fraction: self.clean_fraction,
            peak: self.peak,
            corrupt: CorruptOptions { rate_tenths: self.rates.clone(), ..Default::default() },
        }
    }
}
