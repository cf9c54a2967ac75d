//! Transcript acceptor with disfluency arcs.
//!
//! On top of the linear backbone, epsilon-input arcs allow the aligned phone
//! sequence to deviate from the transcript:
//!
//! - word repetition (W): from the end of word `j` back to the start of word
//!   `k`, for `j - k < max_phrase_words`, so single words and short phrases
//!   can be repeated;
//! - deletion (D): from the start of word `i` to the start of word `i + 1`
//!   (the final state for the last word); chaining deletes several words;
//! - part-word repetition (PW): from every state strictly inside a word back
//!   to that word's start, repeating a proper prefix.
//!
//! With `alpha = 1 - 10^-beta`, backbone arcs cost `-ln alpha`. A state whose
//! epsilon arcs all belong to one class gives each of them `-ln(1 - alpha)`;
//! at word boundaries, where both D and W arcs leave, the mass is halved
//! between the two classes. Each epsilon arc writes an event label on its
//! output tape so decoded paths name the disfluencies they contain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{PhoneTranscript, PhoneVocab};
use crate::wfst::{Arc, Fst, FstBuilder, Label, Weight, EPSILON};

pub const DEFAULT_MAX_PHRASE_WORDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    WordRepeat,
    PartWordRepeat,
    WordDelete,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::WordRepeat => "WORD_REPEAT",
            EventKind::PartWordRepeat => "PART_WORD_REPEAT",
            EventKind::WordDelete => "WORD_DELETE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "WORD_REPEAT" => Some(EventKind::WordRepeat),
            "PART_WORD_REPEAT" => Some(EventKind::PartWordRepeat),
            "WORD_DELETE" => Some(EventKind::WordDelete),
            _ => None,
        }
    }
}

/// Reserved output labels for events, allocated just past the vocabulary.
/// Word repetitions get one label per span so a decoded path identifies the
/// exact arc taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventLabels {
    base: Label,
    max_phrase_words: usize,
}

impl EventLabels {
    pub fn new(vocab: &PhoneVocab, max_phrase_words: usize) -> Self {
        EventLabels { base: vocab.len() as Label + 1, max_phrase_words }
    }

    pub fn part_word(&self) -> Label {
        self.base
    }

    pub fn delete(&self) -> Label {
        self.base + 1
    }

    /// Label of a repetition arc jumping back over `span` words (1 = the word
    /// just finished).
    pub fn repeat(&self, span: usize) -> Label {
        debug_assert!(span >= 1 && span <= self.max_phrase_words);
        self.base + 1 + span as Label
    }

    /// Kind and span (words for W and D, 0 for PW) of an event label.
    pub fn decode(&self, label: Label) -> Option<(EventKind, usize)> {
        match label.checked_sub(self.base)? as usize {
            0 => Some((EventKind::PartWordRepeat, 0)),
            1 => Some((EventKind::WordDelete, 1)),
            k if k - 1 <= self.max_phrase_words => Some((EventKind::WordRepeat, k - 1)),
            _ => None,
        }
    }
}

/// Which disfluency arc classes to build; switching one off ablates it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcClasses {
    pub word_repeat: bool,
    pub deletion: bool,
    pub part_word: bool,
}

impl Default for ArcClasses {
    fn default() -> Self {
        ArcClasses { word_repeat: true, deletion: true, part_word: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModifiedFsaOptions {
    pub beta: f64,
    pub max_phrase_words: usize,
    pub arcs: ArcClasses,
}

impl ModifiedFsaOptions {
    pub fn with_beta(beta: f64) -> Self {
        ModifiedFsaOptions { beta, max_phrase_words: DEFAULT_MAX_PHRASE_WORDS, arcs: ArcClasses::default() }
    }
}

/// Cost of a backbone arc, `-ln(1 - 10^-beta)`.
pub fn backbone_cost(beta: f64) -> f64 {
    if beta == f64::INFINITY {
        0.0
    } else {
        -(-(10f64.powf(-beta))).ln_1p()
    }
}

/// Cost of an epsilon arc at a state with a single arc class,
/// `-ln(10^-beta) = beta ln 10`.
pub fn epsilon_cost(beta: f64) -> f64 {
    beta * std::f64::consts::LN_10
}

/// Cost of each epsilon arc at a state shared by deletion and repetition arcs.
pub fn split_epsilon_cost(beta: f64) -> f64 {
    epsilon_cost(beta) + std::f64::consts::LN_2
}

pub fn build_modified_fsa(y: &PhoneTranscript, vocab: &PhoneVocab, opts: &ModifiedFsaOptions) -> Result<Fst> {
    if opts.beta.is_nan() || opts.beta < 0.0 {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {}", opts.beta)));
    }
    if opts.max_phrase_words == 0 {
        return Err(Error::InvalidArgument("max_phrase_words must be >= 1".into()));
    }
    let labels = EventLabels::new(vocab, opts.max_phrase_words);
    let flat = y.flat();
    let starts = y.word_starts();
    let n_words = y.num_words();
    let len = flat.len();

    let mut b = FstBuilder::new(vocab.space(), vocab.event_space());
    for _ in 0..=len {
        b.add_state();
    }
    b.set_start(0);
    b.set_final(len as u32, Weight::ONE);

    let backbone = Weight::new(backbone_cost(opts.beta));
    let single = Weight::new(epsilon_cost(opts.beta));
    let split = Weight::new(split_epsilon_cost(opts.beta));

    // Word that starts at each position, and word containing each position.
    let mut starting_word = vec![None; len + 1];
    let mut word_of = vec![0; len];
    for w in 0..n_words {
        starting_word[starts[w]] = Some(w);
        word_of[starts[w]..starts[w + 1]].fill(w);
    }

    for pos in 0..=len {
        if pos < len {
            b.add_arc(pos as u32, Arc::new(flat[pos], flat[pos], backbone, pos as u32 + 1));
        }

        let mut eps: Vec<(Label, usize)> = Vec::new();
        let mut classes = 0;
        if opts.arcs.deletion {
            if let Some(w) = starting_word[pos] {
                eps.push((labels.delete(), starts[w + 1]));
                classes += 1;
            }
        }
        let ends_word = pos > 0 && (pos == len || starting_word[pos].is_some());
        if opts.arcs.word_repeat && ends_word {
            let last = word_of[pos - 1];
            let first = (last + 1).saturating_sub(opts.max_phrase_words);
            for k in (first..=last).rev() {
                eps.push((labels.repeat(last - k + 1), starts[k]));
            }
            classes += 1;
        }
        if opts.arcs.part_word && pos > 0 && !ends_word {
            eps.push((labels.part_word(), starts[word_of[pos]]));
            classes += 1;
        }

        let w = if classes > 1 { split } else { single };
        for (label, target) in eps {
            b.add_arc(pos as u32, Arc::new(EPSILON, label, w, target as u32));
        }
    }
    b.freeze()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dont_ask(beta: f64) -> (PhoneVocab, Fst) {
        let v = PhoneVocab::cmu();
        let y = PhoneTranscript::parse("D AA N T | AE S K", &v).unwrap();
        let f = build_modified_fsa(&y, &v, &ModifiedFsaOptions::with_beta(beta)).unwrap();
        (v, f)
    }

    fn eps_arcs(f: &Fst, s: u32) -> Vec<(Label, u32, f64)> {
        f.arcs(s).iter().filter(|a| a.ilabel == EPSILON).map(|a| (a.olabel, a.next_state, a.weight.cost())).collect()
    }

    #[test]
    fn dont_ask_structure() {
        let (v, f) = dont_ask(1.0);
        let ev = EventLabels::new(&v, 3);
        let single = 10f64.ln();
        let split = 20f64.ln();
        assert_eq!(f.num_states(), 8);
        // 7 backbone + 2 D + 3 W + 5 PW
        assert_eq!(f.num_arcs(), 17);

        let close = |got: Vec<(Label, u32, f64)>, want: Vec<(Label, u32, f64)>| {
            assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
            for (g, w) in got.iter().zip(&want) {
                assert_eq!((g.0, g.1), (w.0, w.1));
                assert!((g.2 - w.2).abs() < 1e-12, "{} vs {}", g.2, w.2);
            }
        };
        close(eps_arcs(&f, 0), vec![(ev.delete(), 4, single)]);
        for s in 1..=3 {
            close(eps_arcs(&f, s), vec![(ev.part_word(), 0, single)]);
        }
        close(eps_arcs(&f, 4), vec![(ev.delete(), 7, split), (ev.repeat(1), 0, split)]);
        for s in 5..=6 {
            close(eps_arcs(&f, s), vec![(ev.part_word(), 4, single)]);
        }
        close(eps_arcs(&f, 7), vec![(ev.repeat(1), 4, single), (ev.repeat(2), 0, single)]);
    }

    #[test]
    fn beta_one_costs() {
        assert!((backbone_cost(1.0) - (-(0.9f64).ln())).abs() < 1e-12);
        assert!((epsilon_cost(1.0) - 10f64.ln()).abs() < 1e-12);
        assert!((split_epsilon_cost(1.0) - 20f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn large_beta_keeps_finite_penalty() {
        assert_eq!(backbone_cost(1000.0), 0.0);
        assert!((epsilon_cost(1000.0) - 2302.585092994046).abs() < 1e-9);
        assert!(backbone_cost(100.0) > 0.0 && backbone_cost(100.0) < 1e-99);
    }

    #[test]
    fn infinite_beta_blocks_epsilons() {
        let (_, f) = dont_ask(f64::INFINITY);
        for s in f.states() {
            for a in f.arcs(s) {
                if a.ilabel == EPSILON {
                    assert!(a.weight.is_zero());
                } else {
                    assert_eq!(a.weight, Weight::ONE);
                }
            }
        }
    }

    #[test]
    fn ablation_removes_classes_and_resplits() {
        let v = PhoneVocab::cmu();
        let ev = EventLabels::new(&v, 3);
        let y = PhoneTranscript::parse("D AA N T | AE S K", &v).unwrap();
        let mut opts = ModifiedFsaOptions::with_beta(1.0);
        opts.arcs.deletion = false;
        let f = build_modified_fsa(&y, &v, &opts).unwrap();
        assert_eq!(eps_arcs(&f, 0), vec![]);
        let at4 = eps_arcs(&f, 4);
        assert_eq!(at4.len(), 1);
        assert_eq!(at4[0].0, ev.repeat(1));
        assert!((at4[0].2 - 10f64.ln()).abs() < 1e-12);

        opts.arcs = ArcClasses { word_repeat: false, deletion: false, part_word: false };
        let f = build_modified_fsa(&y, &v, &opts).unwrap();
        assert_eq!(f.num_arcs(), 7);
    }

    #[test]
    fn phrase_cap_limits_lookback() {
        let v = PhoneVocab::cmu();
        let y = PhoneTranscript::parse("AA | AE | AH | AO | AW", &v).unwrap();
        let f = build_modified_fsa(&y, &v, &ModifiedFsaOptions::with_beta(1.0)).unwrap();
        let ev = EventLabels::new(&v, 3);
        // end of the fifth word: repeats reach back to words 4, 3 and 2 only
        let targets: Vec<u32> = eps_arcs(&f, 5).iter().filter(|a| a.0 != ev.delete()).map(|a| a.1).collect();
        assert_eq!(targets, vec![4, 3, 2]);
        // single-phone words have no interior states, hence no PW arcs
        assert!(f.states().all(|s| eps_arcs(&f, s).iter().all(|a| a.0 != ev.part_word())));
    }

    #[test]
    fn event_label_decoding() {
        let v = PhoneVocab::cmu();
        let ev = EventLabels::new(&v, 3);
        assert_eq!(ev.part_word(), 43);
        assert_eq!(ev.decode(ev.part_word()), Some((EventKind::PartWordRepeat, 0)));
        assert_eq!(ev.decode(ev.delete()), Some((EventKind::WordDelete, 1)));
        assert_eq!(ev.decode(ev.repeat(3)), Some((EventKind::WordRepeat, 3)));
        assert_eq!(ev.decode(ev.repeat(3) + 1), None);
        assert_eq!(ev.decode(5), None);
    }

    #[test]
    fn rejects_negative_beta() {
        let v = PhoneVocab::cmu();
        let y = PhoneTranscript::parse("AA", &v).unwrap();
        assert!(build_modified_fsa(&y, &v, &ModifiedFsaOptions::with_beta(-1.0)).is_err());
        assert!(build_modified_fsa(&y, &v, &ModifiedFsaOptions::with_beta(f64::NAN)).is_err());
    }
}
