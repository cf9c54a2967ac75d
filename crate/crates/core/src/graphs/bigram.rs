use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graphs::{PhoneTranscript, PhoneVocab};
use crate::wfst::{Arc, Fst, FstBuilder, Label, Weight};

pub const DEFAULT_ADD_K: f64 = 0.1;

/// Add-k bigram counts over a transcript's flat phone sequence, with a
/// sentence-start context and an end-of-sequence event.
#[derive(Clone, Debug)]
pub struct BigramCounts {
    /// `None` is the sentence-start context.
    pairs: HashMap<(Option<Label>, Label), usize>,
    ends: HashMap<Option<Label>, usize>,
    totals: HashMap<Option<Label>, usize>,
    /// Observed contexts in order of first occurrence.
    contexts: Vec<Label>,
    num_phones: usize,
    add_k: f64,
}

impl BigramCounts {
    pub fn new(y: &PhoneTranscript, vocab: &PhoneVocab, add_k: f64) -> Result<Self> {
        if !(add_k > 0.0 && add_k.is_finite()) {
            return Err(Error::InvalidArgument(format!("add_k must be > 0, got {add_k}")));
        }
        let flat = y.flat();
        let mut pairs = HashMap::new();
        let mut ends = HashMap::new();
        let mut totals = HashMap::new();
        let mut contexts = Vec::new();
        let mut prev: Option<Label> = None;
        for &p in &flat {
            *pairs.entry((prev, p)).or_insert(0) += 1;
            *totals.entry(prev).or_insert(0) += 1;
            if !contexts.contains(&p) {
                contexts.push(p);
            }
            prev = Some(p);
        }
        *ends.entry(prev).or_insert(0) += 1;
        *totals.entry(prev).or_insert(0) += 1;
        Ok(BigramCounts { pairs, ends, totals, contexts, num_phones: vocab.num_phones(), add_k })
    }

    fn denominator(&self, ctx: Option<Label>) -> f64 {
        let total = self.totals.get(&ctx).copied().unwrap_or(0) as f64;
        total + self.add_k * (self.num_phones as f64 + 1.0)
    }

    /// `P(next | ctx)`; `ctx = None` is the sentence start.
    pub fn prob(&self, ctx: Option<Label>, next: Label) -> f64 {
        let c = self.pairs.get(&(ctx, next)).copied().unwrap_or(0) as f64;
        (c + self.add_k) / self.denominator(ctx)
    }

    pub fn end_prob(&self, ctx: Option<Label>) -> f64 {
        let c = self.ends.get(&ctx).copied().unwrap_or(0) as f64;
        (c + self.add_k) / self.denominator(ctx)
    }
}

/// Phone bigram acceptor biased towards the transcript.
///
/// States: the sentence start, one per phone seen in the transcript, and one
/// shared state for every unseen context (whose smoothed distribution is
/// uniform). Every phone of the vocabulary can follow every state, and every
/// state is final with the end-of-sequence cost.
pub fn build_biased_bigram(y: &PhoneTranscript, vocab: &PhoneVocab, add_k: f64) -> Result<Fst> {
    let counts = BigramCounts::new(y, vocab, add_k)?;
    let mut b = FstBuilder::acceptor(vocab.space());
    let start = b.add_state();
    b.set_start(start);
    let mut state_of: HashMap<Label, u32> = HashMap::new();
    for &c in &counts.contexts {
        state_of.insert(c, b.add_state());
    }
    let shared = b.add_state();

    let phones: Vec<Label> = vocab.phones().collect();
    // epsilon never occurs as a context, so its counts are all zero
    let contexts = std::iter::once((start, None))
        .chain(counts.contexts.iter().map(|&c| (state_of[&c], Some(c))))
        .chain(std::iter::once((shared, Some(0))));
    for (s, ctx) in contexts {
        for &p in &phones {
            let next = state_of.get(&p).copied().unwrap_or(shared);
            b.add_arc(s, Arc::new(p, p, Weight::from_prob(counts.prob(ctx, p)), next));
        }
        b.set_final(s, Weight::from_prob(counts.end_prob(ctx)));
    }
    b.freeze()
}
