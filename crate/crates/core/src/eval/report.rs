use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::align::{Alignment, Segment, WordSegment};
use crate::error::{Error, Result};
use crate::eval::{match_boundaries, relative_reduction, BoundaryCounts, BoundarySet, Level, Matching, WordIds};
use crate::graphs::{EventKind, PhoneVocab};
use crate::synth::{DisfluencySpec, DisfluencyType, RefAlignment};
use crate::wfst::Label;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub level: Level,
    pub tolerance_ms: f64,
    pub frame_shift_ms: f64,
    pub matching: Matching,
}

impl EvalOptions {
    /// 40 ms for phones, 100 ms for words, 10 ms frames.
    pub fn for_level(level: Level) -> Self {
        let tolerance_ms = match level {
            Level::Phone => 40.0,
            Level::Word => 100.0,
        };
        EvalOptions { level, tolerance_ms, frame_shift_ms: 10.0, matching: Matching::Greedy }
    }
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions::for_level(Level::Phone)
    }
}

/// Additive per-utterance counts; pooling tallies gives micro-averaged
/// corpus metrics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub boundaries: BoundaryCounts,
    pub frames_correct: usize,
    pub frames: usize,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Self) {
        self.boundaries += o.boundaries;
        self.frames_correct += o.frames_correct;
        self.frames += o.frames;
    }
}

impl std::iter::Sum for Tally {
    fn sum<I: Iterator<Item = Tally>>(iter: I) -> Self {
        iter.fold(Tally::default(), |mut a, b| {
            a += b;
            a
        })
    }
}

/// Scores an alignment against the verbatim reference of the same frames.
pub fn score_alignment(
    a: &Alignment,
    reference: &RefAlignment,
    vocab: &PhoneVocab,
    opts: &EvalOptions,
    ids: &mut WordIds,
) -> Result<Tally> {
    score_parts(&a.segments, &a.words, &a.frame_labels, reference, vocab, opts, ids)
}

/// Scores alignment pieces, e.g. as read back from a TSV file.
pub fn score_parts(
    segments: &[Segment],
    words: &[WordSegment],
    frame_labels: &[Label],
    reference: &RefAlignment,
    vocab: &PhoneVocab,
    opts: &EvalOptions,
    ids: &mut WordIds,
) -> Result<Tally> {
    let (pred, gold) = match opts.level {
        Level::Phone => (BoundarySet::phones(segments), BoundarySet::reference_phones(reference)),
        Level::Word => (BoundarySet::words(words, ids), BoundarySet::reference_words(reference, ids)),
    };
    let boundaries = match_boundaries(&pred, &gold, opts.tolerance_ms, opts.frame_shift_ms, opts.matching)?;
    let gold_labels = reference.frame_labels(vocab);
    if gold_labels.len() != frame_labels.len() {
        return Err(Error::InvalidArgument(format!(
            "alignment has {} frames, reference {}",
            frame_labels.len(),
            gold_labels.len()
        )));
    }
    let frames_correct = frame_labels.iter().zip(&gold_labels).filter(|(x, y)| x == y).count();
    Ok(Tally { boundaries, frames_correct, frames: gold_labels.len() })
}

pub const METRICS: [&str; 5] = ["precision", "recall", "f1", "r_value", "overlap"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub r_value: f64,
    pub overlap: f64,
    /// Percentage drop of each metric relative to a verbatim run.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reductions: BTreeMap<String, f64>,
}

impl MetricsReport {
    pub fn from_tally(t: &Tally) -> Result<Self> {
        if t.frames == 0 {
            return Err(Error::UndefinedMetric("no frames scored".into()));
        }
        let b = &t.boundaries;
        Ok(MetricsReport {
            precision: b.precision(),
            recall: b.recall()?,
            f1: b.f1()?,
            r_value: b.r_value()?,
            overlap: t.frames_correct as f64 / t.frames as f64,
            reductions: BTreeMap::new(),
        })
    }

    pub fn get(&self, metric: &str) -> Option<f64> {
        Some(match metric {
            "precision" => self.precision,
            "recall" => self.recall,
            "f1" => self.f1,
            "r_value" => self.r_value,
            "overlap" => self.overlap,
            _ => return None,
        })
    }

    /// Fills `reductions` against `verbatim`. Metrics whose verbatim value is
    /// zero are left out.
    pub fn with_reductions(mut self, verbatim: &MetricsReport) -> Self {
        self.reductions = METRICS
            .iter()
            .filter_map(|&m| {
                let r = relative_reduction(verbatim.get(m)?, self.get(m)?).ok()?;
                Some((m.to_string(), r))
            })
            .collect();
        self
    }

    pub fn reduction(&self, metric: &str) -> Option<f64> {
        self.reductions.get(metric).copied()
    }
}

/// Plain-text table with one row per method and a reduction column after
/// each metric. Missing reductions print as `-`.
pub fn format_table(rows: &[(String, MetricsReport)]) -> String {
    let heads = ["P", "R", "F1", "R-val", "Overlap"];
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<width$}", "method");
    for h in heads {
        let _ = write!(out, " {h:>7} {:>8}", format!("{h}↓%"));
    }
    out.push('\n');
    for (name, r) in rows {
        let _ = write!(out, "{name:<width$}");
        for m in METRICS {
            let red = r.reduction(m).map_or_else(|| "-".to_string(), |x| format!("{x:.1}"));
            let _ = write!(out, " {:>7.3} {red:>8}", r.get(m).unwrap_or(f64::NAN));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeverityRow {
    pub label: String,
    pub p: f64,
    pub utterances: usize,
    pub report: MetricsReport,
}

impl SeverityRow {
    pub fn f1_reduction(&self) -> Option<f64> {
        self.report.reduction("f1")
    }
}

fn bucket_label(p: f64) -> String {
    match (p * 10.0).round() as i64 {
        1 => "mild".into(),
        2 => "moderate".into(),
        3 => "severe".into(),
        _ => format!("p={p}"),
    }
}

/// Pools approximate and verbatim tallies per disfluency rate. Each entry is
/// `(p, approximate, verbatim)`; rows come out in increasing `p`.
pub fn severity_report(entries: &[(Option<f64>, Tally, Tally)]) -> Result<Vec<SeverityRow>> {
    let mut buckets: BTreeMap<i64, (usize, Tally, Tally)> = BTreeMap::new();
    for (i, (p, approx, verb)) in entries.iter().enumerate() {
        let p = p.ok_or_else(|| Error::Format(format!("utterance {i} has no disfluency rate")))?;
        let b = buckets.entry((p * 1000.0).round() as i64).or_default();
        b.0 += 1;
        b.1 += *approx;
        b.2 += *verb;
    }
    buckets
        .into_iter()
        .map(|(key, (n, approx, verb))| {
            let p = key as f64 / 1000.0;
            let verbatim = MetricsReport::from_tally(&verb)?;
            let report = MetricsReport::from_tally(&approx)?.with_reductions(&verbatim);
            Ok(SeverityRow { label: bucket_label(p), p, utterances: n, report })
        })
        .collect()
}

/// Counts planted repetitions of the given types matched by a repetition
/// event whose span overlaps the inserted frames. Returns `(found, planted)`.
pub fn planted_event_recall(
    specs: &[DisfluencySpec],
    events: &[crate::align::Event],
    kinds: &[DisfluencyType],
) -> (usize, usize) {
    let wanted = |k: DisfluencyType| match k {
        DisfluencyType::W | DisfluencyType::PH => EventKind::WordRepeat,
        DisfluencyType::PW => EventKind::PartWordRepeat,
        DisfluencyType::D => EventKind::WordDelete,
    };
    let mut found = 0;
    let mut planted = 0;
    for s in specs.iter().filter(|s| kinds.contains(&s.kind)) {
        planted += 1;
        let hit = events.iter().any(|e| {
            let (a, b) = e.span();
            e.kind == wanted(s.kind)
                && if a == b || s.start_frame == s.end_frame {
                    // Point events match when they touch the span.
                    a <= s.end_frame && s.start_frame <= b
                } else {
                    a < s.end_frame && s.start_frame < b
                }
        });
        found += hit as usize;
    }
    (found, planted)
}
