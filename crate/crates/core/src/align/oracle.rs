use crate::align::{Alignment, Segment};
use crate::error::{Error, Result};
use crate::graphs::{check_vocab, LogProbMatrix, PhoneTranscript, PhoneVocab};
use crate::wfst::Weight;

/// Linear-mode forced alignment by the classic CTC trellis over
/// `blank y1 blank y2 ... yL blank`, without any transducer machinery.
///
/// Ties between predecessors prefer staying in the same trellis state, then
/// advancing by one, then skipping a blank; the final cell prefers ending on
/// the trailing blank.
pub fn viterbi_oracle(e: &LogProbMatrix, y: &PhoneTranscript, vocab: &PhoneVocab) -> Result<Alignment> {
    check_vocab(e, vocab)?;
    let frames = e.frames();
    if frames < y.min_frames() {
        return Err(Error::Infeasible { needed: y.min_frames(), available: frames });
    }
    let blank = vocab.blank_id();
    let flat = y.flat();
    let mut word_of = Vec::with_capacity(flat.len());
    for (w, word) in y.words().iter().enumerate() {
        word_of.extend(std::iter::repeat_n(w, word.len()));
    }

    let mut ext = vec![blank];
    for &p in &flat {
        ext.push(p);
        ext.push(blank);
    }
    let n = ext.len();
    let mut cost = vec![f64::INFINITY; frames * n];
    let mut back = vec![0u8; frames * n];
    let emit = |t: usize, s: usize| -e.log_prob(t, ext[s]);

    cost[0] = emit(0, 0);
    cost[1] = emit(0, 1);
    for t in 1..frames {
        let (prev, cur) = cost.split_at_mut(t * n);
        let prev = &prev[(t - 1) * n..];
        for s in 0..n {
            let mut best = prev[s];
            let mut step = 0u8;
            if s >= 1 && prev[s - 1] < best {
                best = prev[s - 1];
                step = 1;
            }
            if s >= 2 && ext[s] != blank && ext[s] != ext[s - 2] && prev[s - 2] < best {
                best = prev[s - 2];
                step = 2;
            }
            cur[s] = best + emit(t, s);
            back[t * n + s] = step;
        }
    }

    let last = &cost[(frames - 1) * n..];
    let mut s = if last[n - 2] < last[n - 1] { n - 2 } else { n - 1 };
    let total = last[s];
    if !total.is_finite() {
        return Err(Error::EmptyLanguage);
    }
    let mut states = vec![0usize; frames];
    for t in (0..frames).rev() {
        states[t] = s;
        s -= back[t * n + s] as usize;
    }

    let frame_labels: Vec<_> = states.iter().map(|&s| ext[s]).collect();
    let mut segments: Vec<Segment> = Vec::new();
    for (t, &s) in states.iter().enumerate() {
        if s % 2 == 0 {
            continue;
        }
        if t > 0 && states[t - 1] == s {
            segments.last_mut().expect("run continues a segment").end_frame = t + 1;
        } else {
            segments.push(Segment { phone: ext[s], start_frame: t, end_frame: t + 1, word_index: word_of[s / 2] });
        }
    }
    let words = Alignment::words_from_segments(&segments, y);
    Ok(Alignment {
        frame_labels,
        segments,
        words,
        events: Vec::new(),
        realized_phones: flat,
        total_cost: Weight::new(total),
        frame_shift_ms: e.frame_shift_ms(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Ingest;

    #[test]
    fn uniform_rows_cost_t_log_n() {
        let v = PhoneVocab::cmu();
        let y = PhoneTranscript::parse("AA B | K", &v).unwrap();
        let n = v.len();
        let row = vec![-(n as f64 - 1.0).ln(); n];
        let mut rows = vec![row; 7];
        for r in rows.iter_mut() {
            r[v.pad_id() as usize - 1] = f64::NEG_INFINITY;
        }
        let e = LogProbMatrix::from_rows(&rows, 10.0, Ingest::Validate).unwrap();
        let a = viterbi_oracle(&e, &y, &v).unwrap();
        assert!((a.total_cost.cost() - 7.0 * (n as f64 - 1.0).ln()).abs() < 1e-9);
        assert_eq!(a.frame_labels.len(), 7);
    }

    #[test]
    fn too_few_frames() {
        let v = PhoneVocab::cmu();
        let y = PhoneTranscript::parse("AA AA", &v).unwrap();
        let e = LogProbMatrix::from_rows(&vec![vec![-(42f64).ln(); 42]; 2], 10.0, Ingest::Renormalize).unwrap();
        assert!(matches!(viterbi_oracle(&e, &y, &v), Err(Error::Infeasible { needed: 3, available: 2 })));
    }
}
