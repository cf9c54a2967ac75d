use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::align::Segment;
use crate::error::{Error, Result};
use crate::graphs::{PhoneTranscript, PhoneVocab};
use crate::wfst::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefPhone {
    pub phone: Label,
    pub start_frame: usize,
    pub end_frame: usize,
}

/// Ground-truth alignment of one utterance: words of timed phones inside
/// `frames` frames. Frames outside every phone are silence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefAlignment {
    pub id: String,
    words: Vec<Vec<RefPhone>>,
    frames: usize,
}

impl RefAlignment {
    pub fn new(id: impl Into<String>, words: Vec<Vec<RefPhone>>, frames: usize, vocab: &PhoneVocab) -> Result<Self> {
        let bad = |m: String| Error::InvalidReference(m);
        if words.is_empty() || words.iter().any(Vec::is_empty) {
            return Err(bad("every reference needs at least one word of at least one phone".into()));
        }
        let mut end = 0;
        for p in words.iter().flatten() {
            if !vocab.is_phone(p.phone) {
                return Err(bad(format!("token {} is not a phone", p.phone)));
            }
            if p.end_frame <= p.start_frame {
                return Err(bad(format!("empty segment at frame {}", p.start_frame)));
            }
            if p.start_frame < end {
                return Err(bad(format!("segment at frame {} overlaps its predecessor", p.start_frame)));
            }
            end = p.end_frame;
        }
        if end > frames {
            return Err(bad(format!("segments run to frame {end} beyond {frames} frames")));
        }
        Ok(RefAlignment { id: id.into(), words, frames })
    }

    pub fn words(&self) -> &[Vec<RefPhone>] {
        &self.words
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    pub fn word_start(&self, w: usize) -> usize {
        self.words[w][0].start_frame
    }

    pub fn word_end(&self, w: usize) -> usize {
        self.words[w].last().expect("words are non-empty").end_frame
    }

    pub fn transcript(&self, vocab: &PhoneVocab) -> Result<PhoneTranscript> {
        PhoneTranscript::new(self.words.iter().map(|w| w.iter().map(|p| p.phone).collect()).collect(), vocab)
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(w, ps)| {
                ps.iter().map(move |p| Segment {
                    phone: p.phone,
                    start_frame: p.start_frame,
                    end_frame: p.end_frame,
                    word_index: w,
                })
            })
            .collect()
    }

    /// Per-frame labels with silence outside the segments.
    pub fn frame_labels(&self, vocab: &PhoneVocab) -> Vec<Label> {
        let mut labels = vec![vocab.sil_id(); self.frames];
        for p in self.words.iter().flatten() {
            labels[p.start_frame..p.end_frame].fill(p.phone);
        }
        labels
    }

    /// `phone start_frame end_frame word_index` lines after a `# FRAMES` line.
    pub fn to_tsv(&self, vocab: &PhoneVocab) -> String {
        let mut out = String::new();
        writeln!(out, "# FRAMES {}", self.frames).unwrap();
        for s in self.segments() {
            let sym = vocab.symbol(s.phone).unwrap_or("?");
            writeln!(out, "{sym}\t{}\t{}\t{}", s.start_frame, s.end_frame, s.word_index).unwrap();
        }
        out
    }

    /// Parses [`RefAlignment::to_tsv`]. Word indices must start at 0 and
    /// increase by at most one per line. Without a `# FRAMES` line the
    /// utterance ends with its last segment.
    pub fn parse_tsv(id: impl Into<String>, text: &str, vocab: &PhoneVocab) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Format(format!("reference line {}: {msg}", line + 1));
        let mut frames = None;
        let mut words: Vec<Vec<RefPhone>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let ["FRAMES", n] = rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                    frames = Some(n.parse().map_err(|_| bad(i, format!("bad frame count `{n}`")))?);
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let [phone, start, end, word] = f.as_slice() else {
                return Err(bad(i, "expected 4 columns".into()));
            };
            let num = |v: &str| v.parse::<usize>().map_err(|_| bad(i, format!("bad integer `{v}`")));
            let (start_frame, end_frame, w) = (num(start)?, num(end)?, num(word)?);
            let phone = vocab.lookup(phone)?;
            if w == words.len() {
                words.push(Vec::new());
            } else if w + 1 != words.len() {
                return Err(bad(i, format!("word index {w} out of sequence")));
            }
            words[w].push(RefPhone { phone, start_frame, end_frame });
        }
        let end = words.iter().flatten().map(|p| p.end_frame).max().unwrap_or(0);
        RefAlignment::new(id, words, frames.unwrap_or(end), vocab)
    }

    pub fn read(path: impl AsRef<Path>, vocab: &PhoneVocab) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let id = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| n.split('.').next().unwrap_or(n).to_string())
            .unwrap_or_default();
        RefAlignment::parse_tsv(id, &text, vocab)
    }
}

/// Random reference alignment of `n_words` words, for synthetic corpora.
///
/// Words have 2 to 5 distinct phones of 3 to 10 frames each, separated by
/// 0 to 3 silent frames, with 5 to 15 silent frames at either end. Two equal
/// phones never touch across a word boundary.
pub fn random_reference(id: impl Into<String>, vocab: &PhoneVocab, n_words: usize, rng: &mut impl Rng) -> RefAlignment {
    assert!(n_words > 0, "a reference needs at least one word");
    let phones: Vec<Label> = vocab.phones().collect();
    let mut t = rng.random_range(5..=15);
    let mut words = Vec::with_capacity(n_words);
    let mut prev_last: Option<Label> = None;
    for w in 0..n_words {
        if w > 0 {
            t += rng.random_range(0..=3);
        }
        let touching = words.last().is_some_and(|p: &Vec<RefPhone>| p.last().unwrap().end_frame == t);
        let len = rng.random_range(2..=5).min(phones.len());
        let mut word: Vec<RefPhone> = Vec::with_capacity(len);
        while word.len() < len {
            let p = *phones.choose(rng).expect("vocabulary has phones");
            if word.iter().any(|q| q.phone == p) || (word.is_empty() && touching && Some(p) == prev_last) {
                continue;
            }
            let d = rng.random_range(3..=10);
            word.push(RefPhone { phone: p, start_frame: t, end_frame: t + d });
            t += d;
        }
        prev_last = word.last().map(|p| p.phone);
        words.push(word);
    }
    let frames = t + rng.random_range(5..=15);
    RefAlignment::new(id, words, frames, vocab).expect("generated reference is valid")
}
