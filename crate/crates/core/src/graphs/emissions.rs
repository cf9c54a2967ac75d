use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wfst::Label;

const MAGIC: &[u8; 4] = b"EMIS";

/// Maximum deviation of a row's log-sum-exp from 0 accepted as a posterior.
pub const ROW_TOLERANCE: f64 = 1e-3;

/// What to do with rows that are not normalised posteriors on ingest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ingest {
    /// Reject rows whose log-sum-exp is off by more than [`ROW_TOLERANCE`].
    Validate,
    /// Subtract each row's log-sum-exp.
    Renormalize,
}

/// `T x N` frame-level log-posteriors, row-major. Column `k` holds token id
/// `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogProbMatrix {
    frames: usize,
    tokens: usize,
    values: Vec<f64>,
    frame_shift_ms: f64,
}

pub fn log_sum_exp(row: &[f64]) -> f64 {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + row.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

impl LogProbMatrix {
    pub fn new(values: Vec<f64>, tokens: usize, frame_shift_ms: f64, ingest: Ingest) -> Result<Self> {
        let mut m = Self::from_scores(values, tokens, frame_shift_ms)?;
        for t in 0..m.frames {
            let row = &mut m.values[t * tokens..(t + 1) * tokens];
            let lse = log_sum_exp(row);
            if !lse.is_finite() {
                return Err(Error::InvalidEmissions(format!("frame {t} has no probability mass")));
            }
            match ingest {
                Ingest::Validate if lse.abs() > ROW_TOLERANCE => {
                    return Err(Error::InvalidEmissions(format!("frame {t} sums to exp({lse:.6}) rather than 1")));
                }
                Ingest::Validate => {}
                Ingest::Renormalize => row.iter_mut().for_each(|x| *x -= lse),
            }
        }
        Ok(m)
    }

    /// Builds a matrix of arbitrary log-domain scores without the posterior
    /// check. Decoding only depends on score differences within a frame, so
    /// shifted or unnormalised scores are still meaningful for it.
    pub fn from_scores(values: Vec<f64>, tokens: usize, frame_shift_ms: f64) -> Result<Self> {
        if tokens == 0 || values.is_empty() || !values.len().is_multiple_of(tokens) {
            return Err(Error::InvalidEmissions(format!(
                "{} values do not form rows of {} tokens",
                values.len(),
                tokens
            )));
        }
        if !(frame_shift_ms > 0.0 && frame_shift_ms.is_finite()) {
            return Err(Error::InvalidEmissions(format!("bad frame shift {frame_shift_ms}")));
        }
        if let Some(x) = values.iter().find(|x| x.is_nan() || **x == f64::INFINITY) {
            return Err(Error::InvalidEmissions(format!("non-log-probability value {x}")));
        }
        Ok(LogProbMatrix { frames: values.len() / tokens, tokens, values, frame_shift_ms })
    }

    pub fn from_rows(rows: &[Vec<f64>], frame_shift_ms: f64, ingest: Ingest) -> Result<Self> {
        let tokens = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != tokens) {
            return Err(Error::InvalidEmissions("ragged rows".into()));
        }
        Self::new(rows.concat(), tokens, frame_shift_ms, ingest)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    pub fn frame_shift_ms(&self) -> f64 {
        self.frame_shift_ms
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.tokens..(t + 1) * self.tokens]
    }

    pub fn log_prob(&self, t: usize, token: Label) -> f64 {
        self.values[t * self.tokens + token as usize - 1]
    }

    /// Token id with the highest score in frame `t` (lowest id on ties).
    pub fn argmax(&self, t: usize) -> Label {
        let row = self.row(t);
        let mut best = 0;
        for k in 1..row.len() {
            if row[k] > row[best] {
                best = k;
            }
        }
        best as Label + 1
    }

    pub fn to_emis_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.frames as u32).to_le_bytes());
        out.extend_from_slice(&(self.tokens as u32).to_le_bytes());
        let shift_us = (self.frame_shift_ms * 1000.0).round() as u32;
        out.extend_from_slice(&shift_us.to_le_bytes());
        for &v in &self.values {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out
    }

    /// Decodes the binary `EMIS` layout: magic, `u32` frames, `u32` tokens,
    /// `u32` frame shift in microseconds, then little-endian `f32` values.
    pub fn from_emis_bytes(bytes: &[u8], ingest: Ingest) -> Result<Self> {
        let bad = |msg: &str| Error::Format(format!("emission file: {msg}"));
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(bad("missing EMIS header"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let (frames, tokens, shift_us) = (word(4), word(8), word(12));
        let expected = frames
            .checked_mul(tokens)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(16))
            .ok_or_else(|| bad("header sizes overflow"))?;
        if bytes.len() != expected {
            return Err(bad(&format!("expected {expected} bytes, found {}", bytes.len())));
        }
        let values = bytes[16..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64).collect();
        Self::new(values, tokens, shift_us as f64 / 1000.0, ingest).map_err(|e| bad(&e.to_string()))
    }

    pub fn read_emis(path: impl AsRef<Path>, ingest: Ingest) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_emis_bytes(&bytes, ingest).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn write_emis(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_emis_bytes()).map_err(|e| Error::io(path, e))
    }
}
