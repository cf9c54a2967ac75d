use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::align::{Alignment, Mode, Segment, WordSegment};
use crate::error::{Error, Result};
use crate::graphs::{EventKind, PhoneVocab};

impl Alignment {
    /// Tab-separated `phone start_ms end_ms word_index`, one phone per line.
    /// Comment lines carry the frame count, word passes and events.
    pub fn to_tsv(&self, vocab: &PhoneVocab) -> String {
        let ms = |f: usize| f as f64 * self.frame_shift_ms;
        let mut out = String::new();
        writeln!(out, "# FRAMES {}", self.num_frames()).unwrap();
        for s in &self.segments {
            let sym = vocab.symbol(s.phone).unwrap_or("?");
            writeln!(out, "{sym}\t{}\t{}\t{}", ms(s.start_frame), ms(s.end_frame), s.word_index).unwrap();
        }
        for w in &self.words {
            writeln!(out, "# WORD {} {} {} {}", w.word_index, w.occurrence, w.start_frame, w.end_frame).unwrap();
        }
        for e in &self.events {
            writeln!(out, "# EVENT {} {} {}", e.kind.as_str(), e.frame, e.word_index).unwrap();
        }
        out
    }
}

/// An alignment read back from its TSV form.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedAlignment {
    pub frames: Option<usize>,
    pub segments: Vec<Segment>,
    pub words: Vec<WordSegment>,
    pub events: Vec<(EventKind, usize, usize)>,
}

impl ParsedAlignment {
    /// Frame labels implied by the segments, blank elsewhere.
    pub fn frame_labels(&self, vocab: &PhoneVocab) -> Vec<u32> {
        let end = self.segments.iter().map(|s| s.end_frame).max().unwrap_or(0);
        let mut labels = vec![vocab.blank_id(); self.frames.unwrap_or(end).max(end)];
        for s in &self.segments {
            labels[s.start_frame..s.end_frame].fill(s.phone);
        }
        labels
    }
}

/// Parses [`Alignment::to_tsv`] output. Without `# WORD` lines, word passes
/// are taken to be runs of equal word index.
pub fn parse_alignment_tsv(text: &str, vocab: &PhoneVocab, frame_shift_ms: f64) -> Result<ParsedAlignment> {
    let bad = |line: usize, msg: &str| Error::Format(format!("alignment line {}: {msg}", line + 1));
    let to_frame = |v: &str, line: usize| -> Result<usize> {
        let ms: f64 = v.parse().map_err(|_| bad(line, &format!("bad time `{v}`")))?;
        if ms.is_nan() || ms < 0.0 {
            return Err(bad(line, "negative time"));
        }
        Ok((ms / frame_shift_ms).round() as usize)
    };
    let int =
        |v: &str, line: usize| -> Result<usize> { v.parse().map_err(|_| bad(line, &format!("bad integer `{v}`"))) };

    let mut parsed = ParsedAlignment { frames: None, segments: Vec::new(), words: Vec::new(), events: Vec::new() };
    let mut word_lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            match f.as_slice() {
                ["FRAMES", n] => parsed.frames = Some(int(n, i)?),
                ["WORD", w, occ, s, e] => word_lines.push((int(w, i)?, int(occ, i)?, int(s, i)?, int(e, i)?)),
                ["EVENT", kind, frame, w] => {
                    let kind = EventKind::parse(kind).ok_or_else(|| bad(i, &format!("unknown event `{kind}`")))?;
                    parsed.events.push((kind, int(frame, i)?, int(w, i)?));
                }
                _ => {}
            }
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let [phone, start, end, word] = f.as_slice() else {
            return Err(bad(i, "expected 4 tab-separated columns"));
        };
        let phone = vocab.lookup(phone)?;
        let (start_frame, end_frame) = (to_frame(start, i)?, to_frame(end, i)?);
        if end_frame <= start_frame {
            return Err(bad(i, "empty or reversed segment"));
        }
        if parsed.segments.last().is_some_and(|p: &Segment| p.end_frame > start_frame) {
            return Err(bad(i, "segments overlap or are out of order"));
        }
        parsed.segments.push(Segment { phone, start_frame, end_frame, word_index: int(word, i)? });
    }

    if word_lines.is_empty() {
        for s in &parsed.segments {
            match parsed.words.last_mut() {
                Some(w) if w.word_index == s.word_index => {
                    w.phones.push(s.phone);
                    w.end_frame = s.end_frame;
                }
                _ => parsed.words.push(WordSegment {
                    word_index: s.word_index,
                    occurrence: 0,
                    start_frame: s.start_frame,
                    end_frame: s.end_frame,
                    phones: vec![s.phone],
                }),
            }
        }
    } else {
        for (word_index, occurrence, start_frame, end_frame) in word_lines {
            let phones = parsed
                .segments
                .iter()
                .filter(|s| s.word_index == word_index && s.start_frame >= start_frame && s.end_frame <= end_frame)
                .map(|s| s.phone)
                .collect();
            parsed.words.push(WordSegment { word_index, occurrence, start_frame, end_frame, phones });
        }
    }
    Ok(parsed)
}

/// Utterance-level summary written next to each alignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub id: String,
    pub mode: Mode,
    #[serde(serialize_with = "ser_beta", deserialize_with = "de_beta")]
    pub beta: Option<f64>,
    pub oer: Option<f64>,
    pub cost: f64,
    pub frames: usize,
    pub events: usize,
}

fn ser_beta<S: Serializer>(beta: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match beta {
        Some(b) if b.is_infinite() => s.serialize_str("inf"),
        Some(b) => s.serialize_f64(*b),
        None => s.serialize_none(),
    }
}

fn de_beta<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Value(f64),
        Text(String),
    }
    match Option::<Repr>::deserialize(d)? {
        None => Ok(None),
        Some(Repr::Value(v)) => Ok(Some(v)),
        Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
        Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("bad beta `{t}`"))),
    }
}
