use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::{Ingest, LogProbMatrix, PhoneVocab};
use crate::synth::RefAlignment;

pub const DEFAULT_PEAK: f64 = 0.9;
pub const DEFAULT_FRAME_SHIFT_MS: f64 = 10.0;

/// Emissions that put `peak` of each frame's mass on the reference label
/// (silence between segments) and spread the rest over all other tokens with
/// random weights drawn from `[0.5, 1.5)`. Deterministic in `seed`.
pub fn synth_emissions(r: &RefAlignment, vocab: &PhoneVocab, peak: f64, seed: u64) -> Result<LogProbMatrix> {
    if !(peak > 0.5 && peak < 1.0) {
        return Err(Error::InvalidArgument(format!("peak must lie in (0.5, 1), got {peak}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = vocab.len();
    let labels = r.frame_labels(vocab);
    let mut values = Vec::with_capacity(labels.len() * n);
    let mut weights = vec![0.0; n];
    for &label in &labels {
        let hot = label as usize - 1;
        for (k, w) in weights.iter_mut().enumerate() {
            *w = if k == hot { 0.0 } else { rng.random_range(0.5..1.5) };
        }
        let total: f64 = weights.iter().sum();
        for (k, &w) in weights.iter().enumerate() {
            let p = if k == hot { peak } else { (1.0 - peak) * w / total };
            values.push(p.ln());
        }
    }
    LogProbMatrix::new(values, n, DEFAULT_FRAME_SHIFT_MS, Ingest::Validate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{random_reference, RefPhone};

    #[test]
    fn peak_on_label() {
        let v = PhoneVocab::cmu();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = random_reference("u", &v, 4, &mut rng);
        let e = synth_emissions(&r, &v, 0.9, 7).unwrap();
        let labels = r.frame_labels(&v);
        for (t, &l) in labels.iter().enumerate() {
            assert!((e.log_prob(t, l).exp() - 0.9).abs() < 1e-9);
            assert_eq!(e.argmax(t), l);
        }
        assert_eq!(e, synth_emissions(&r, &v, 0.9, 7).unwrap());
        assert_ne!(e, synth_emissions(&r, &v, 0.9, 8).unwrap());
    }

    #[test]
    fn silence_only() {
        let v = PhoneVocab::cmu();
        let aa = v.id("AA").unwrap();
        let r =
            RefAlignment::new("u", vec![vec![RefPhone { phone: aa, start_frame: 3, end_frame: 4 }]], 8, &v).unwrap();
        let e = synth_emissions(&r, &v, 0.7, 0).unwrap();
        assert_eq!((0..8).filter(|&t| e.argmax(t) == v.sil_id()).count(), 7);
        assert!(synth_emissions(&r, &v, 0.5, 0).is_err());
    }
}
