//! Planting untranscribed disfluencies into emission matrices.
//!
//! Frames are copied or removed at the emission level: a repeated word or
//! phrase is the copied rows of the original, a deletion drops the rows. The
//! verbatim alignment tracks every copy, while the approximate transcript
//! stays the original one.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{log_sum_exp, Ingest, LogProbMatrix, PhoneTranscript, PhoneVocab};
use crate::synth::{RefAlignment, RefPhone};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DisfluencyType {
    /// Part-word repetition.
    PW,
    /// Word repetition.
    W,
    /// Phrase repetition.
    PH,
    /// Word deletion.
    D,
}

impl DisfluencyType {
    pub const ALL: [DisfluencyType; 4] = [DisfluencyType::PW, DisfluencyType::W, DisfluencyType::PH, DisfluencyType::D];

    pub fn as_str(self) -> &'static str {
        match self {
            DisfluencyType::PW => "PW",
            DisfluencyType::W => "W",
            DisfluencyType::PH => "PH",
            DisfluencyType::D => "D",
        }
    }

    pub fn is_repetition(self) -> bool {
        self != DisfluencyType::D
    }
}

impl fmt::Display for DisfluencyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisfluencyType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DisfluencyType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown disfluency type `{s}`")))
    }
}

/// A disfluency to plant, before it is applied.
///
/// `amount` is the number of extra copies for W, the phrase length in words
/// for PH, the prefix length in phones for PW and the number of deleted words
/// for D. `word` is the repeated word, the first phrase word, the prefixed
/// word or the first deleted word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disfluency {
    pub kind: DisfluencyType,
    pub word: usize,
    pub amount: usize,
}

/// A planted disfluency. `start_frame..end_frame` are the inserted frames
/// in the corrupted matrix (empty for deletions); `insertion_frame` is where
/// the material was inserted or removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisfluencySpec {
    pub kind: DisfluencyType,
    pub word: usize,
    pub amount: usize,
    pub insertion_frame: usize,
    pub start_frame: usize,
    pub end_frame: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corruption {
    pub emissions: LogProbMatrix,
    pub verbatim: RefAlignment,
    pub approximate: PhoneTranscript,
    pub specs: Vec<DisfluencySpec>,
    /// Sampled disfluency rate.
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorruptOptions {
    /// Candidate rates in tenths; one is drawn uniformly per utterance.
    pub rate_tenths: Vec<u32>,
    /// Candidate types, drawn uniformly per disfluency.
    pub types: Vec<DisfluencyType>,
}

impl Default for CorruptOptions {
    fn default() -> Self {
        CorruptOptions { rate_tenths: vec![1, 2, 3], types: DisfluencyType::ALL.to_vec() }
    }
}

/// Number of disfluencies for `n` words at rate `tenths / 10`: the ceiling
/// of the product, in integers so `0.3 * 10` gives 3.
pub fn disfluency_count(tenths: u32, n: usize) -> usize {
    (tenths as usize * n).div_ceil(10)
}

const ATTEMPTS: usize = 200;
const RESTARTS: usize = 20;

/// Draws `count` non-overlapping disfluencies for words of the given
/// lengths. W and PW never target the final word, PW needs a word of at
/// least two phones, and deletions never remove every word. If the words run
/// out, further repetitions may share a target with earlier ones. A plan
/// that leaves no room for its remaining disfluencies is redrawn.
pub fn plan_disfluencies(
    word_lens: &[usize],
    count: usize,
    types: &[DisfluencyType],
    rng: &mut impl Rng,
) -> Result<Vec<Disfluency>> {
    let n = word_lens.len();
    if n > 0 && !types.is_empty() {
        for _ in 0..RESTARTS {
            if let Some(plan) = draw_plan(word_lens, count, types, rng) {
                return Ok(plan);
            }
        }
    }
    Err(Error::NoEligibleDisfluency { words: n })
}

fn draw_plan(
    word_lens: &[usize],
    count: usize,
    types: &[DisfluencyType],
    rng: &mut impl Rng,
) -> Option<Vec<Disfluency>> {
    let n = word_lens.len();
    let mut claimed = vec![false; n];
    let mut deleted = vec![false; n];
    let mut plan = Vec::with_capacity(count);
    for _ in 0..count {
        let mut placed = None;
        'attempts: for attempt in 0..2 * ATTEMPTS {
            let shared = attempt >= ATTEMPTS;
            let kind = *types.choose(rng).expect("types is non-empty");
            let d = match kind {
                DisfluencyType::W if n >= 2 => {
                    Disfluency { kind, word: rng.random_range(0..n - 1), amount: rng.random_range(1..=3) }
                }
                DisfluencyType::PW if n >= 2 => {
                    let word = rng.random_range(0..n - 1);
                    if word_lens[word] < 2 {
                        continue 'attempts;
                    }
                    Disfluency { kind, word, amount: rng.random_range(1..word_lens[word]) }
                }
                DisfluencyType::PH => {
                    let amount = rng.random_range(2..=3);
                    if amount > n {
                        continue 'attempts;
                    }
                    Disfluency { kind, word: rng.random_range(0..=n - amount), amount }
                }
                DisfluencyType::D => {
                    let amount = rng.random_range(1..=3);
                    if amount > n {
                        continue 'attempts;
                    }
                    let word = rng.random_range(0..=n - amount);
                    let remaining = deleted.iter().filter(|&&x| !x).count();
                    if amount >= remaining {
                        continue 'attempts;
                    }
                    Disfluency { kind, word, amount }
                }
                _ => continue 'attempts,
            };
            let covered = match d.kind {
                DisfluencyType::PH | DisfluencyType::D => d.word..d.word + d.amount,
                _ => d.word..d.word + 1,
            };
            let free = if shared && d.kind.is_repetition() {
                !covered.clone().any(|w| deleted[w])
            } else {
                !covered.clone().any(|w| claimed[w])
            };
            if free {
                for w in covered {
                    claimed[w] = true;
                    deleted[w] |= d.kind == DisfluencyType::D;
                }
                placed = Some(d);
                break;
            }
        }
        plan.push(placed?);
    }
    Some(plan)
}

/// Samples a rate, plans `ceil(p * n)` disfluencies and applies them.
pub fn corrupt(
    r: &RefAlignment,
    e: &LogProbMatrix,
    vocab: &PhoneVocab,
    opts: &CorruptOptions,
    seed: u64,
) -> Result<Corruption> {
    corrupt_with_rng(r, e, vocab, opts, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn corrupt_with_rng(
    r: &RefAlignment,
    e: &LogProbMatrix,
    vocab: &PhoneVocab,
    opts: &CorruptOptions,
    rng: &mut impl Rng,
) -> Result<Corruption> {
    let tenths = draw_rate(opts, rng)?;
    corrupt_at_rate(r, e, vocab, tenths, &opts.types, rng)
}

/// Draws a rate, in tenths, from `opts.rate_tenths`.
pub fn draw_rate(opts: &CorruptOptions, rng: &mut impl Rng) -> Result<u32> {
    opts.rate_tenths
        .choose(rng)
        .copied()
        .ok_or_else(|| Error::InvalidArgument("no disfluency rates to choose from".into()))
}

/// Corrupts at a fixed rate of `tenths / 10`.
pub fn corrupt_at_rate(
    r: &RefAlignment,
    e: &LogProbMatrix,
    vocab: &PhoneVocab,
    tenths: u32,
    types: &[DisfluencyType],
    rng: &mut impl Rng,
) -> Result<Corruption> {
    let lens: Vec<usize> = r.words().iter().map(Vec::len).collect();
    let plan = plan_disfluencies(&lens, disfluency_count(tenths, lens.len()), types, rng)?;
    let mut c = apply_disfluencies(r, e, vocab, &plan)?;
    c.p = tenths as f64 / 10.0;
    Ok(c)
}

struct Piece {
    rows: Range<usize>,
    words: Vec<Vec<RefPhone>>,
    spec: Option<usize>,
}

/// Applies a fixed plan. Insertions go before their target word in plan
/// order. Each copy of a word or phrase carries the silence that followed it,
/// and a silent frame is added wherever a splice would make two equal phones
/// touch, so every verbatim alignment stays realisable. Rows on either side
/// of a splice are cross-faded 3:1 in probability space.
pub fn apply_disfluencies(
    r: &RefAlignment,
    e: &LogProbMatrix,
    vocab: &PhoneVocab,
    plan: &[Disfluency],
) -> Result<Corruption> {
    if r.frames() != e.frames() {
        return Err(Error::InvalidReference(format!(
            "reference covers {} frames, emissions have {}",
            r.frames(),
            e.frames()
        )));
    }
    let n = r.num_words();
    let words = r.words();
    let mut deleted_by: Vec<Option<usize>> = vec![None; n];
    let mut before: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, d) in plan.iter().enumerate() {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("{} at word {}: {m}", d.kind, d.word)));
        if d.word >= n {
            return bad("no such word");
        }
        match d.kind {
            DisfluencyType::W if d.amount == 0 => return bad("needs at least one copy"),
            DisfluencyType::PW if d.amount == 0 || d.amount >= words[d.word].len() => {
                return bad("prefix must be a proper, non-empty prefix")
            }
            DisfluencyType::PH | DisfluencyType::D if d.amount == 0 || d.word + d.amount > n => {
                return bad("span runs past the last word")
            }
            _ => {}
        }
        if d.kind == DisfluencyType::D {
            for slot in &mut deleted_by[d.word..d.word + d.amount] {
                if slot.is_some() {
                    return bad("words deleted twice");
                }
                *slot = Some(k);
            }
        } else {
            before[d.word].push(k);
        }
    }
    if deleted_by.iter().all(Option::is_some) {
        return Err(Error::InvalidArgument("deletions would remove every word".into()));
    }

    // End of the material copied for words `..=w`: up to the next word.
    let through = |w: usize| if w + 1 < n { r.word_start(w + 1) } else { r.word_end(w) };
    let mut pieces = Vec::new();
    let mut cursor = 0;
    for i in 0..n {
        let start = r.word_start(i);
        if cursor < start {
            pieces.push(Piece { rows: cursor..start, words: vec![], spec: None });
        }
        for &k in &before[i] {
            let d = plan[k];
            match d.kind {
                DisfluencyType::W => {
                    for _ in 0..d.amount {
                        pieces.push(Piece { rows: start..through(i), words: vec![words[i].clone()], spec: Some(k) });
                    }
                }
                DisfluencyType::PH => {
                    let last = i + d.amount - 1;
                    pieces.push(Piece { rows: start..through(last), words: words[i..=last].to_vec(), spec: Some(k) });
                }
                DisfluencyType::PW => {
                    let prefix = words[i][..d.amount].to_vec();
                    let end = prefix.last().expect("prefix is non-empty").end_frame;
                    pieces.push(Piece { rows: start..end, words: vec![prefix], spec: Some(k) });
                }
                DisfluencyType::D => unreachable!("deletions are not insertions"),
            }
        }
        match deleted_by[i] {
            Some(k) => {
                if plan[k].word == i {
                    pieces.push(Piece { rows: start..start, words: vec![], spec: Some(k) });
                }
                cursor = through(i);
            }
            None => {
                pieces.push(Piece { rows: start..r.word_end(i), words: vec![words[i].clone()], spec: None });
                cursor = r.word_end(i);
            }
        }
    }
    if cursor < r.frames() {
        pieces.push(Piece { rows: cursor..r.frames(), words: vec![], spec: None });
    }

    let labels = r.frame_labels(vocab);
    let silence_row = labels.iter().position(|&l| l == vocab.sil_id());
    let tokens = e.tokens();
    let mut values: Vec<f64> = Vec::with_capacity(e.values().len());
    let mut out_words: Vec<Vec<RefPhone>> = Vec::new();
    let mut splices = Vec::new();
    let mut spans: Vec<Option<(usize, usize)>> = vec![None; plan.len()];
    let mut prev_end: Option<usize> = None;
    let mut last_label = None;

    for piece in pieces {
        let mut t = values.len() / tokens;
        if piece.rows.is_empty() {
            if let Some(k) = piece.spec {
                spans[k] = Some((t, t));
            }
            continue;
        }
        let first_label = labels[piece.rows.start];
        if prev_end != Some(piece.rows.start) && t > 0 {
            if last_label == Some(first_label) && first_label != vocab.sil_id() {
                if let Some(s) = silence_row {
                    splices.push(t);
                    values.extend_from_slice(e.row(s));
                    t += 1;
                }
            }
            splices.push(t);
        }
        if let Some(k) = piece.spec {
            let span = spans[k].get_or_insert((t, t));
            span.1 = t + piece.rows.len();
        }
        let shift = |f: usize| f - piece.rows.start + t;
        for w in &piece.words {
            out_words.push(
                w.iter()
                    .map(|p| RefPhone {
                        phone: p.phone,
                        start_frame: shift(p.start_frame),
                        end_frame: shift(p.end_frame),
                    })
                    .collect(),
            );
        }
        for row in piece.rows.clone() {
            values.extend_from_slice(e.row(row));
        }
        prev_end = Some(piece.rows.end);
        last_label = Some(labels[piece.rows.end - 1]);
    }

    let frames = values.len() / tokens;
    for &b in &splices {
        if b > 0 && b < frames {
            crossfade(&mut values, tokens, b);
        }
    }

    let specs = plan
        .iter()
        .zip(&spans)
        .map(|(d, span)| {
            let (start_frame, end_frame) = span.expect("every planned disfluency produces a piece");
            DisfluencySpec {
                kind: d.kind,
                word: d.word,
                amount: d.amount,
                insertion_frame: start_frame,
                start_frame,
                end_frame,
            }
        })
        .collect();
    Ok(Corruption {
        emissions: LogProbMatrix::new(values, tokens, e.frame_shift_ms(), Ingest::Validate)?,
        verbatim: RefAlignment::new(r.id.clone(), out_words, frames, vocab)?,
        approximate: r.transcript(vocab)?,
        specs,
        p: 0.0,
    })
}

/// Mixes rows `b - 1` and `b` as `3L + R` and `L + 3R` (quarters) in
/// probability space and renormalises both.
fn crossfade(values: &mut [f64], tokens: usize, b: usize) {
    let (head, tail) = values.split_at_mut(b * tokens);
    let left = &mut head[(b - 1) * tokens..];
    let right = &mut tail[..tokens];
    for k in 0..tokens {
        let (l, r) = (left[k].exp(), right[k].exp());
        left[k] = (0.75 * l + 0.25 * r).ln();
        right[k] = (0.25 * l + 0.75 * r).ln();
    }
    for row in [left, right] {
        let z = log_sum_exp(row);
        row.iter_mut().for_each(|v| *v -= z);
    }
}
