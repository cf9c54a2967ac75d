use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wfst::{Label, TokenSpace};

pub const SIL: &str = "[SIL]";
pub const UNK: &str = "[UNK]";
pub const PAD: &str = "[PAD]";

/// The 39 CMU phones (stress removed).
pub const CMU_PHONES: [&str; 39] = [
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH", "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH",
];

/// Token table shared by emissions, transcripts and graphs.
///
/// Token ids start at 1 (the line number in a vocabulary file); 0 is epsilon.
/// `[SIL]` doubles as the CTC blank, since the acoustic model the emissions
/// come from has no dedicated blank output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhoneVocab {
    symbols: Vec<String>,
    index: HashMap<String, Label>,
    sil_id: Label,
    unk_id: Label,
    pad_id: Label,
}

impl PhoneVocab {
    /// The 42-token reference table: 39 CMU phones, then `[SIL]`, `[UNK]`,
    /// `[PAD]`.
    pub fn cmu() -> Self {
        let symbols = CMU_PHONES.iter().copied().chain([SIL, UNK, PAD]);
        Self::from_symbols(symbols).expect("built-in table is valid")
    }

    pub fn from_symbols<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(char::is_whitespace) || s == "|" {
                return Err(Error::Format(format!("invalid vocabulary symbol {s:?}")));
            }
            if index.insert(s.clone(), (i + 1) as Label).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary symbol {s}")));
            }
        }
        let find = |name: &str| {
            index.get(name).copied().ok_or_else(|| Error::Format(format!("vocabulary lacks reserved symbol {name}")))
        };
        let (sil_id, unk_id, pad_id) = (find(SIL)?, find(UNK)?, find(PAD)?);
        if symbols.len() < 4 {
            return Err(Error::Format("vocabulary has no phones".into()));
        }
        Ok(PhoneVocab { symbols, index, sil_id, unk_id, pad_id })
    }

    /// Reads one symbol per line; blank lines are ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_symbols(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn to_text(&self) -> String {
        let mut s = self.symbols.join("\n");
        s.push('\n');
        s
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn id(&self, symbol: &str) -> Option<Label> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: Label) -> Option<&str> {
        id.checked_sub(1).and_then(|i| self.symbols.get(i as usize)).map(String::as_str)
    }

    pub fn sil_id(&self) -> Label {
        self.sil_id
    }

    pub fn blank_id(&self) -> Label {
        self.sil_id
    }

    pub fn unk_id(&self) -> Label {
        self.unk_id
    }

    pub fn pad_id(&self) -> Label {
        self.pad_id
    }

    pub fn contains(&self, id: Label) -> bool {
        id >= 1 && (id as usize) <= self.symbols.len()
    }

    /// A real phone: in the table and not one of the reserved tokens.
    pub fn is_phone(&self, id: Label) -> bool {
        self.contains(id) && id != self.sil_id && id != self.unk_id && id != self.pad_id
    }

    pub fn ids(&self) -> impl Iterator<Item = Label> {
        1..=self.symbols.len() as Label
    }

    pub fn phones(&self) -> impl Iterator<Item = Label> + '_ {
        self.ids().filter(|&id| self.is_phone(id))
    }

    pub fn num_phones(&self) -> usize {
        self.len() - 3
    }

    /// Tokens that can label a frame: everything except `[PAD]`.
    pub fn frame_tokens(&self) -> impl Iterator<Item = Label> + '_ {
        self.ids().filter(|&id| id != self.pad_id)
    }

    pub fn space(&self) -> TokenSpace {
        TokenSpace::new(format!("vocab:{}", self.len()))
    }

    /// Output space of graphs that also emit disfluency event labels.
    pub fn event_space(&self) -> TokenSpace {
        TokenSpace::new(format!("vocab:{}+events", self.len()))
    }

    pub fn lookup(&self, symbol: &str) -> Result<Label> {
        self.id(symbol).ok_or_else(|| Error::Format(format!("unknown phone symbol {symbol}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_table_has_42_tokens() {
        let v = PhoneVocab::cmu();
        assert_eq!(v.len(), 42);
        assert_eq!(v.num_phones(), 39);
        assert_eq!(v.phones().count(), 39);
        assert_eq!(v.blank_id(), v.sil_id());
        assert_eq!(v.id("AA"), Some(1));
        assert_eq!(v.symbol(v.pad_id()), Some(PAD));
        assert_eq!(v.symbol(0), None);
        assert!(!v.contains(0));
        assert_eq!(v.frame_tokens().count(), 41);
    }

    #[test]
    fn text_round_trip() {
        let v = PhoneVocab::cmu();
        assert_eq!(PhoneVocab::parse(&v.to_text()).unwrap(), v);
    }

    #[test]
    fn reserved_symbols_required() {
        assert!(PhoneVocab::parse("AA\nAE\n[SIL]\n[PAD]\n").is_err());
        assert!(PhoneVocab::parse("AA\nAA\n[SIL]\n[UNK]\n[PAD]\n").is_err());
        assert!(PhoneVocab::parse("AA\nAE\n[SIL]\n[UNK]\n[PAD]\n").is_ok());
    }
}
