use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{EventKind, EventLabels, PhoneTranscript, PhoneVocab};
use crate::wfst::{Label, Path, Weight, EPSILON};

/// One aligned phone: frames `start_frame..end_frame` carry `phone`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub phone: Label,
    pub start_frame: usize,
    pub end_frame: usize,
    /// Index of the transcript word this phone was read from.
    pub word_index: usize,
}

/// One pass over (a prefix of) a transcript word. Repeated words produce
/// several passes with increasing `occurrence`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSegment {
    pub word_index: usize,
    pub occurrence: usize,
    pub start_frame: usize,
    pub end_frame: usize,
    pub phones: Vec<Label>,
}

/// A disfluency arc taken by the alignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    /// Frames consumed before the arc was taken. The arc itself may consume
    /// a blank or a continuation frame when composition pairs it with one.
    pub frame: usize,
    /// For repetitions the first repeated word, for deletions the skipped one.
    pub word_index: usize,
    /// Words jumped over (1 for a single-word repeat or a deletion, 0 for a
    /// part-word repeat).
    pub span_words: usize,
    /// First frame of the material that is repeated; equals `frame` for
    /// deletions.
    pub start_frame: usize,
    /// Passes over `word_index` completed before the event.
    pub occurrence: usize,
}

impl Event {
    /// Frames of the repeated material, `start_frame..frame`.
    pub fn span(&self) -> (usize, usize) {
        (self.start_frame, self.frame)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub frame_labels: Vec<Label>,
    pub segments: Vec<Segment>,
    pub words: Vec<WordSegment>,
    pub events: Vec<Event>,
    pub realized_phones: Vec<Label>,
    pub total_cost: Weight,
    pub frame_shift_ms: f64,
}

impl Alignment {
    pub fn num_frames(&self) -> usize {
        self.frame_labels.len()
    }

    pub fn onsets(&self) -> Vec<(Label, usize)> {
        self.segments.iter().map(|s| (s.phone, s.start_frame)).collect()
    }

    /// Groups consecutive segments into word passes. A new pass starts
    /// whenever the word index changes or the word's first phone recurs.
    pub(crate) fn words_from_segments(segments: &[Segment], y: &PhoneTranscript) -> Vec<WordSegment> {
        let words = y.words();
        let mut out: Vec<WordSegment> = Vec::new();
        let mut seen = vec![0usize; words.len()];
        let mut offset = 0usize;
        for s in segments {
            let continues =
                out.last().is_some_and(|w| w.word_index == s.word_index && offset < words[s.word_index].len());
            if !continues {
                out.push(WordSegment {
                    word_index: s.word_index,
                    occurrence: seen[s.word_index],
                    start_frame: s.start_frame,
                    end_frame: s.end_frame,
                    phones: Vec::new(),
                });
                seen[s.word_index] += 1;
                offset = 0;
            }
            let w = out.last_mut().expect("pass pushed above");
            w.phones.push(s.phone);
            w.end_frame = s.end_frame;
            offset += 1;
        }
        out
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedPath(msg.into())
}

/// Turns a shortest path through an alignment graph into an [`Alignment`].
///
/// Output labels are replayed against the transcript acceptor: phones advance
/// one position, event labels move as their arc does. Any label that the
/// acceptor could not have produced, a path ending away from the final state,
/// or a frame count other than `frames` is reported as a malformed path.
pub fn decode_path(
    path: &Path,
    vocab: &PhoneVocab,
    y: &PhoneTranscript,
    labels: &EventLabels,
    frames: usize,
    frame_shift_ms: f64,
) -> Result<Alignment> {
    let flat = y.flat();
    let starts = y.word_starts();
    let n_words = y.num_words();
    let len = flat.len();
    let mut word_of = vec![0usize; len];
    for w in 0..n_words {
        word_of[starts[w]..starts[w + 1]].fill(w);
    }
    let blank = vocab.blank_id();

    let mut t = 0usize;
    let mut pos = 0usize;
    let mut frame_labels = Vec::with_capacity(frames);
    let mut segments: Vec<Segment> = Vec::new();
    let mut words: Vec<WordSegment> = Vec::new();
    let mut events = Vec::new();
    let mut open: Option<usize> = None;
    let mut passes = vec![0usize; n_words];
    let mut last_pass: Vec<Option<usize>> = vec![None; n_words];

    for pa in &path.arcs {
        let arc = &pa.arc;
        if vocab.is_phone(arc.olabel) {
            if pos >= len || flat[pos] != arc.olabel {
                return Err(malformed(format!("phone {} at transcript position {pos}", arc.olabel)));
            }
            if arc.ilabel != arc.olabel {
                return Err(malformed(format!("phone {} written on frame {}", arc.olabel, arc.ilabel)));
            }
            let w = word_of[pos];
            if pos == starts[w] {
                words.push(WordSegment {
                    word_index: w,
                    occurrence: passes[w],
                    start_frame: t,
                    end_frame: t + 1,
                    phones: Vec::new(),
                });
                passes[w] += 1;
                last_pass[w] = Some(words.len() - 1);
            }
            let pass = words.last_mut().ok_or_else(|| malformed("phone outside any word"))?;
            pass.phones.push(arc.olabel);
            pass.end_frame = t + 1;
            segments.push(Segment { phone: arc.olabel, start_frame: t, end_frame: t + 1, word_index: w });
            open = Some(segments.len() - 1);
            pos += 1;
        } else if arc.olabel != EPSILON {
            let (kind, span) =
                labels.decode(arc.olabel).ok_or_else(|| malformed(format!("unknown output label {}", arc.olabel)))?;
            let at_word_start = pos < len && starts[word_of[pos]] == pos;
            let event = match kind {
                EventKind::PartWordRepeat => {
                    if pos >= len || at_word_start {
                        return Err(malformed(format!("part-word repeat at position {pos}")));
                    }
                    let w = word_of[pos];
                    let pass = &words[last_pass[w].ok_or_else(|| malformed("part-word repeat of unseen word"))?];
                    let ev = Event {
                        kind,
                        frame: t,
                        word_index: w,
                        span_words: 0,
                        start_frame: pass.start_frame,
                        occurrence: pass.occurrence,
                    };
                    pos = starts[w];
                    ev
                }
                EventKind::WordDelete => {
                    if !at_word_start {
                        return Err(malformed(format!("deletion at position {pos}")));
                    }
                    let w = word_of[pos];
                    pos = starts[w + 1];
                    Event { kind, frame: t, word_index: w, span_words: 1, start_frame: t, occurrence: passes[w] }
                }
                EventKind::WordRepeat => {
                    let ended = if pos == len {
                        n_words - 1
                    } else if at_word_start && word_of[pos] > 0 {
                        word_of[pos] - 1
                    } else {
                        return Err(malformed(format!("word repeat at position {pos}")));
                    };
                    if span > ended + 1 {
                        return Err(malformed(format!("word repeat over {span} words after word {ended}")));
                    }
                    let k = ended + 1 - span;
                    // Earliest frame of the current passes over k..=ended; a
                    // deleted word has no pass of its own.
                    let start_frame =
                        (k..=ended).filter_map(|w| last_pass[w].map(|i| words[i].start_frame)).min().unwrap_or(t);
                    pos = starts[k];
                    Event { kind, frame: t, word_index: k, span_words: span, start_frame, occurrence: passes[k] }
                }
            };
            events.push(event);
        }

        if arc.ilabel != EPSILON {
            frame_labels.push(arc.ilabel);
            if !vocab.is_phone(arc.olabel) {
                if arc.ilabel == blank {
                    open = None;
                } else {
                    match open {
                        Some(i) if segments[i].phone == arc.ilabel => {
                            segments[i].end_frame = t + 1;
                            if let Some(pass) = words.last_mut() {
                                pass.end_frame = t + 1;
                            }
                        }
                        _ => return Err(malformed(format!("frame {t} carries {} without a phone", arc.ilabel))),
                    }
                }
            }
            t += 1;
        }
    }

    if t != frames {
        return Err(malformed(format!("path consumes {t} frames, expected {frames}")));
    }
    if pos != len {
        return Err(malformed(format!("path stops at transcript position {pos} of {len}")));
    }
    let realized_phones = segments.iter().map(|s| s.phone).collect();
    Ok(Alignment {
        frame_labels,
        segments,
        words,
        events,
        realized_phones,
        total_cost: path.total_cost,
        frame_shift_ms,
    })
}

/// CTC collapse: merge repeats, then drop blanks.
pub fn ctc_collapse(frame_labels: &[Label], blank: Label) -> Vec<Label> {
    let mut out = Vec::new();
    let mut prev = None;
    for &l in frame_labels {
        if Some(l) != prev && l != blank {
            out.push(l);
        }
        prev = Some(l);
    }
    out
}
