use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graphs::{build_biased_bigram, build_emission_graph, LogProbMatrix, PhoneTranscript, PhoneVocab};
use crate::wfst::{compose, shortest_path, trim, Fst, Label};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OerResult {
    /// Unclipped; may exceed 1 when the decode is much longer than the
    /// transcript.
    pub oer: f64,
    pub decoded_phones: Vec<Label>,
    pub clipped: bool,
}

impl OerResult {
    pub fn new(decoded_phones: Vec<Label>, reference: &[Label]) -> Self {
        let oer = edit_distance(&decoded_phones, reference) as f64 / reference.len() as f64;
        OerResult { oer, decoded_phones, clipped: oer > 1.0 }
    }

    /// The rate restricted to `[0, 1]`.
    pub fn clipped_oer(&self) -> f64 {
        self.oer.clamp(0.0, 1.0)
    }
}

/// Oracle error rate of `y` against the emissions: the phone string decoded
/// under a bigram grammar biased towards `y`, scored by edit distance per
/// reference phone. `topology` must be the CTC topology of `vocab`.
pub fn compute_oer(
    e: &LogProbMatrix,
    y: &PhoneTranscript,
    vocab: &PhoneVocab,
    topology: &Fst,
    add_k: f64,
    lm_scale: f64,
) -> Result<OerResult> {
    let g = build_biased_bigram(y, vocab, add_k)?.scale_weights(lm_scale);
    let tg = trim(&compose(topology, &g)?);
    let emissions = build_emission_graph(e, vocab)?;
    let path = shortest_path(&compose(&emissions, &tg)?)?;
    Ok(OerResult::new(path.olabels(), &y.flat()))
}

/// Per-utterance weight `10^(1 - O)` with `O` clipped to `[0, 1]`, so the
/// result lies in `[1, 10]`.
pub fn adaptive_beta(o: &OerResult) -> f64 {
    10f64.powf(1.0 - o.clipped_oer())
}

/// Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}
