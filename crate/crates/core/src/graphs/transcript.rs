use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graphs::PhoneVocab;
use crate::wfst::Label;

/// A phonetic transcription grouped into words.
///
/// Text form: words separated by ` | `, phones by spaces, e.g.
/// `D AA N T | AE S K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhoneTranscript {
    words: Vec<Vec<Label>>,
}

impl PhoneTranscript {
    pub fn new(words: Vec<Vec<Label>>, vocab: &PhoneVocab) -> Result<Self> {
        if words.is_empty() || words.iter().any(Vec::is_empty) {
            return Err(Error::EmptyTranscript);
        }
        if let Some(&token) = words.iter().flatten().find(|&&t| !vocab.is_phone(t)) {
            return Err(Error::InvalidPhone { token });
        }
        Ok(PhoneTranscript { words })
    }

    pub fn parse(line: &str, vocab: &PhoneVocab) -> Result<Self> {
        let words = line
            .split('|')
            .map(|w| w.split_whitespace().map(|p| vocab.lookup(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(words, vocab)
    }

    pub fn to_text(&self, vocab: &PhoneVocab) -> String {
        let mut out = String::new();
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                out.push_str(" | ");
            }
            for (j, &p) in w.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", vocab.symbol(p).unwrap_or("?"));
            }
        }
        out
    }

    pub fn words(&self) -> &[Vec<Label>] {
        &self.words
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    pub fn num_phones(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    pub fn flat(&self) -> Vec<Label> {
        self.words.iter().flatten().copied().collect()
    }

    /// Flat offset of each word's first phone, followed by the total length.
    pub fn word_starts(&self) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.words.len() + 1);
        let mut pos = 0;
        starts.push(0);
        for w in &self.words {
            pos += w.len();
            starts.push(pos);
        }
        starts
    }

    /// Minimum frames for a CTC realisation: one per phone plus one blank
    /// between each pair of identical neighbours.
    pub fn min_frames(&self) -> usize {
        let flat = self.flat();
        flat.len() + flat.windows(2).filter(|w| w[0] == w[1]).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let v = PhoneVocab::cmu();
        let t = PhoneTranscript::parse("D AA N T | AE S K", &v).unwrap();
        assert_eq!(t.num_words(), 2);
        assert_eq!(t.num_phones(), 7);
        assert_eq!(t.word_starts(), vec![0, 4, 7]);
        assert_eq!(t.to_text(&v), "D AA N T | AE S K");
    }

    #[test]
    fn rejects_empty_and_reserved() {
        let v = PhoneVocab::cmu();
        assert!(matches!(PhoneTranscript::parse("", &v), Err(Error::EmptyTranscript)));
        assert!(matches!(PhoneTranscript::parse("AA | | AE", &v), Err(Error::EmptyTranscript)));
        assert!(matches!(PhoneTranscript::parse("AA [SIL]", &v), Err(Error::InvalidPhone { .. })));
        assert!(PhoneTranscript::parse("AA QQ", &v).is_err());
    }

    #[test]
    fn min_frames_counts_repeats() {
        let v = PhoneVocab::cmu();
        assert_eq!(PhoneTranscript::parse("AA AA | AE", &v).unwrap().min_frames(), 4);
        assert_eq!(PhoneTranscript::parse("AA | AA", &v).unwrap().min_frames(), 3);
        assert_eq!(PhoneTranscript::parse("AA AE", &v).unwrap().min_frames(), 2);
    }
}
