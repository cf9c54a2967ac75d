use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::align::{Segment, WordSegment};
use crate::error::{Error, Result};
use crate::synth::RefAlignment;
use crate::wfst::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Phone,
    Word,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phone" => Ok(Level::Phone),
            "word" => Ok(Level::Word),
            _ => Err(Error::InvalidArgument(format!("unknown level `{s}`, expected phone or word"))),
        }
    }
}

/// Labelled onsets, ordered by time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySet {
    level: Level,
    items: Vec<(u32, usize)>,
}

/// Interns word contents (phone strings) to ids, so word boundaries match by
/// what was said rather than by transcript position.
#[derive(Clone, Debug, Default)]
pub struct WordIds(HashMap<Vec<Label>, u32>);

impl WordIds {
    pub fn id(&mut self, phones: &[Label]) -> u32 {
        let next = self.0.len() as u32;
        *self.0.entry(phones.to_vec()).or_insert(next)
    }
}

impl BoundarySet {
    pub fn new(level: Level, items: Vec<(u32, usize)>) -> Result<Self> {
        if items.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(Error::InvalidArgument("boundary onsets must be non-decreasing".into()));
        }
        Ok(BoundarySet { level, items })
    }

    pub fn phones(segments: &[Segment]) -> Self {
        let mut items: Vec<_> = segments.iter().map(|s| (s.phone, s.start_frame)).collect();
        items.sort_by_key(|&(_, t)| t);
        BoundarySet { level: Level::Phone, items }
    }

    pub fn words(words: &[WordSegment], ids: &mut WordIds) -> Self {
        let mut items: Vec<_> = words.iter().map(|w| (ids.id(&w.phones), w.start_frame)).collect();
        items.sort_by_key(|&(_, t)| t);
        BoundarySet { level: Level::Word, items }
    }

    pub fn reference_phones(r: &RefAlignment) -> Self {
        BoundarySet::phones(&r.segments())
    }

    pub fn reference_words(r: &RefAlignment, ids: &mut WordIds) -> Self {
        let mut items: Vec<_> = r
            .words()
            .iter()
            .map(|w| (ids.id(&w.iter().map(|p| p.phone).collect::<Vec<_>>()), w[0].start_frame))
            .collect();
        items.sort_by_key(|&(_, t)| t);
        BoundarySet { level: Level::Word, items }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn items(&self) -> &[(u32, usize)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Every onset moved by `offset` frames.
    pub fn shifted(&self, offset: usize) -> Self {
        BoundarySet { level: self.level, items: self.items.iter().map(|&(l, t)| (l, t + offset)).collect() }
    }
}

/// How predictions are paired with reference boundaries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matching {
    /// In time order, each prediction takes the earliest free reference
    /// boundary of its label within tolerance. This finds a maximum matching.
    #[default]
    Greedy,
    /// In time order, each prediction takes the closest free reference
    /// boundary of its label within tolerance.
    Nearest,
}

impl std::str::FromStr for Matching {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Matching::Greedy),
            "nearest" => Ok(Matching::Nearest),
            _ => Err(Error::InvalidArgument(format!("unknown matching `{s}`, expected greedy or nearest"))),
        }
    }
}

/// Hit and set-size counts; they add up across utterances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCounts {
    pub hits: usize,
    pub n_pred: usize,
    pub n_ref: usize,
}

impl std::ops::AddAssign for BoundaryCounts {
    fn add_assign(&mut self, o: Self) {
        self.hits += o.hits;
        self.n_pred += o.n_pred;
        self.n_ref += o.n_ref;
    }
}

impl BoundaryCounts {
    /// 0 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        if self.n_pred == 0 {
            0.0
        } else {
            self.hits as f64 / self.n_pred as f64
        }
    }

    pub fn recall(&self) -> Result<f64> {
        if self.n_ref == 0 {
            return Err(Error::UndefinedMetric("recall of an empty reference".into()));
        }
        Ok(self.hits as f64 / self.n_ref as f64)
    }

    pub fn f1(&self) -> Result<f64> {
        let (p, r) = (self.precision(), self.recall()?);
        Ok(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) })
    }

    /// Boundary-detection R-value from the hit rate and over-segmentation,
    /// clipped to `[0, 1]`. Over-segmentation uses set sizes, so it is defined
    /// even with no predictions.
    pub fn r_value(&self) -> Result<f64> {
        let hr = 100.0 * self.recall()?;
        let os = 100.0 * (self.n_pred as f64 / self.n_ref as f64 - 1.0);
        Ok(r_value_from(hr, os))
    }
}

/// `1 - (|r1| + |r2|) / 200` with `r1 = sqrt((100 - HR)^2 + OS^2)` and
/// `r2 = (HR - OS - 100) / sqrt 2`, clipped to `[0, 1]`.
pub fn r_value_from(hit_rate: f64, over_segmentation: f64) -> f64 {
    let r1 = ((100.0 - hit_rate).powi(2) + over_segmentation.powi(2)).sqrt();
    let r2 = (-over_segmentation + hit_rate - 100.0) / std::f64::consts::SQRT_2;
    (1.0 - (r1.abs() + r2.abs()) / 200.0).clamp(0.0, 1.0)
}

/// Counts one-to-one label-matched hits within `tolerance_ms` (inclusive).
pub fn match_boundaries(
    pred: &BoundarySet,
    reference: &BoundarySet,
    tolerance_ms: f64,
    frame_shift_ms: f64,
    matching: Matching,
) -> Result<BoundaryCounts> {
    if pred.level != reference.level {
        return Err(Error::InvalidArgument("cannot match phone boundaries against word boundaries".into()));
    }
    if !(tolerance_ms >= 0.0 && frame_shift_ms > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be >= 0 and frame shift > 0".into()));
    }
    // Largest frame distance within tolerance; the epsilon absorbs rounding
    // in e.g. 40 / 10.
    let reach = (tolerance_ms / frame_shift_ms + 1e-9).floor() as usize;

    let mut by_label: HashMap<u32, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for &(l, t) in &pred.items {
        by_label.entry(l).or_default().0.push(t);
    }
    for &(l, t) in &reference.items {
        by_label.entry(l).or_default().1.push(t);
    }
    let mut hits = 0;
    for (ps, rs) in by_label.values() {
        hits += match matching {
            Matching::Greedy => greedy_hits(ps, rs, reach),
            Matching::Nearest => nearest_hits(ps, rs, reach),
        };
    }
    Ok(BoundaryCounts { hits, n_pred: pred.len(), n_ref: reference.len() })
}

fn greedy_hits(ps: &[usize], rs: &[usize], reach: usize) -> usize {
    let (mut j, mut hits) = (0, 0);
    for &p in ps {
        while j < rs.len() && rs[j] + reach < p {
            j += 1;
        }
        if j < rs.len() && rs[j] <= p + reach {
            hits += 1;
            j += 1;
        }
    }
    hits
}

fn nearest_hits(ps: &[usize], rs: &[usize], reach: usize) -> usize {
    let mut used = vec![false; rs.len()];
    let mut hits = 0;
    for &p in ps {
        let best = rs
            .iter()
            .enumerate()
            .filter(|&(k, &r)| !used[k] && r.abs_diff(p) <= reach)
            .min_by_key(|&(k, &r)| (r.abs_diff(p), k));
        if let Some((k, _)) = best {
            used[k] = true;
            hits += 1;
        }
    }
    hits
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub r_value: f64,
}

impl BoundaryScores {
    pub fn from_counts(c: &BoundaryCounts) -> Result<Self> {
        Ok(BoundaryScores { precision: c.precision(), recall: c.recall()?, f1: c.f1()?, r_value: c.r_value()? })
    }
}

pub fn boundary_metrics(
    pred: &BoundarySet,
    reference: &BoundarySet,
    tolerance_ms: f64,
    frame_shift_ms: f64,
    matching: Matching,
) -> Result<BoundaryScores> {
    BoundaryScores::from_counts(&match_boundaries(pred, reference, tolerance_ms, frame_shift_ms, matching)?)
}

/// Fraction of frames whose labels agree.
pub fn frame_overlap(pred: &[Label], reference: &[Label]) -> Result<f64> {
    if pred.len() != reference.len() {
        return Err(Error::InvalidArgument(format!(
            "frame label sequences differ in length: {} vs {}",
            pred.len(),
            reference.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::UndefinedMetric("overlap of empty sequences".into()));
    }
    Ok(pred.iter().zip(reference).filter(|(a, b)| a == b).count() as f64 / pred.len() as f64)
}

/// Percentage drop from `m_verbatim` to `m_approximate`.
pub fn relative_reduction(m_verbatim: f64, m_approximate: f64) -> Result<f64> {
    if m_verbatim == 0.0 {
        return Err(Error::UndefinedMetric("relative reduction against a zero verbatim metric".into()));
    }
    Ok((m_verbatim - m_approximate) / m_verbatim * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[(u32, usize)]) -> BoundarySet {
        BoundarySet::new(Level::Phone, items.to_vec()).unwrap()
    }

    #[test]
    fn perfect_match() {
        let r = set(&[(1, 0), (2, 5), (1, 9)]);
        let s = boundary_metrics(&r, &r, 40.0, 10.0, Matching::Greedy).unwrap();
        assert_eq!((s.precision, s.recall, s.f1, s.r_value), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn worked_r_value() {
        let c = BoundaryCounts { hits: 2, n_pred: 2, n_ref: 4 };
        assert!((c.r_value().unwrap() - 0.646_446_6).abs() < 1e-6);
    }

    #[test]
    fn tolerance_is_inclusive() {
        let r = set(&[(1, 100)]);
        let p = BoundarySet::new(Level::Phone, vec![(1, 104)]).unwrap();
        // 4 frames of 10 ms = 40 ms
        assert_eq!(match_boundaries(&p, &r, 40.0, 10.0, Matching::Greedy).unwrap().hits, 1);
        assert_eq!(match_boundaries(&p, &r, 39.0, 10.0, Matching::Greedy).unwrap().hits, 0);
        // 45 ms at 5 ms frames
        let p = set(&[(1, 109)]);
        assert_eq!(match_boundaries(&p, &r, 40.0, 5.0, Matching::Greedy).unwrap().hits, 0);
        assert_eq!(match_boundaries(&p, &r, 100.0, 5.0, Matching::Greedy).unwrap().hits, 1);
    }

    #[test]
    fn label_mismatch_is_miss_and_false_alarm() {
        let c = match_boundaries(&set(&[(2, 0)]), &set(&[(1, 0)]), 40.0, 10.0, Matching::Greedy).unwrap();
        assert_eq!(c, BoundaryCounts { hits: 0, n_pred: 1, n_ref: 1 });
    }

    #[test]
    fn greedy_beats_nearest_when_it_matters() {
        // Nearest pairs the prediction at 3 with the reference at 4 and
        // strands the reference at 0.
        let p = set(&[(1, 3), (1, 7)]);
        let r = set(&[(1, 0), (1, 4)]);
        assert_eq!(match_boundaries(&p, &r, 30.0, 10.0, Matching::Greedy).unwrap().hits, 2);
        assert_eq!(match_boundaries(&p, &r, 30.0, 10.0, Matching::Nearest).unwrap().hits, 1);
    }

    #[test]
    fn errors() {
        let w = BoundarySet::new(Level::Word, vec![(1, 0)]).unwrap();
        assert!(match_boundaries(&set(&[(1, 0)]), &w, 40.0, 10.0, Matching::Greedy).is_err());
        assert!(boundary_metrics(&set(&[(1, 0)]), &set(&[]), 40.0, 10.0, Matching::Greedy).is_err());
        assert!(BoundarySet::new(Level::Phone, vec![(1, 5), (1, 4)]).is_err());
        assert!(frame_overlap(&[1, 2], &[1]).is_err());
        assert!(relative_reduction(0.0, 0.1).is_err());
    }

    #[test]
    fn overlap_and_reduction() {
        assert_eq!(frame_overlap(&[1, 2, 3, 4], &[1, 2, 3, 4]).unwrap(), 1.0);
        assert_eq!(frame_overlap(&[1, 1], &[2, 2]).unwrap(), 0.0);
        assert_eq!(frame_overlap(&[1, 2, 3, 4], &[1, 2, 0, 0]).unwrap(), 0.5);
        assert_eq!(relative_reduction(0.6, 0.6).unwrap(), 0.0);
        assert_eq!(relative_reduction(1.0, 0.5).unwrap(), 50.0);
        assert!((relative_reduction(0.6, 0.47).unwrap() - 21.666_666).abs() < 1e-4);
    }
}
