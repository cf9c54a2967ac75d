use crate::error::{Error, Result};
use crate::graphs::{LogProbMatrix, PhoneVocab};
use crate::wfst::{Arc, Fst, FstBuilder, Weight};

/// Linear acceptor over the `T` frames of `e`. From state `t` there is one
/// arc per frame token (everything but `[PAD]`) costing the negated
/// log-posterior of that token at frame `t`.
pub fn build_emission_graph(e: &LogProbMatrix, vocab: &PhoneVocab) -> Result<Fst> {
    check_vocab(e, vocab)?;
    let mut b = FstBuilder::acceptor(vocab.space());
    let mut s = b.add_state();
    b.set_start(s);
    let tokens: Vec<_> = vocab.frame_tokens().collect();
    for t in 0..e.frames() {
        let next = b.add_state();
        for &tok in &tokens {
            b.add_arc(s, Arc::new(tok, tok, Weight::from_log_prob(e.log_prob(t, tok)), next));
        }
        s = next;
    }
    b.set_final(s, Weight::ONE);
    b.freeze()
}

pub(crate) fn check_vocab(e: &LogProbMatrix, vocab: &PhoneVocab) -> Result<()> {
    if e.tokens() != vocab.len() {
        return Err(Error::VocabMismatch(format!(
            "emissions have {} tokens, vocabulary has {}",
            e.tokens(),
            vocab.len()
        )));
    }
    Ok(())
}
