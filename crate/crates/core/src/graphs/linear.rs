use crate::error::Result;
use crate::graphs::{PhoneTranscript, PhoneVocab};
use crate::wfst::{Arc, Fst, FstBuilder, Weight};

/// Acceptor for exactly the flat phone sequence of `y`: a chain of
/// `phones + 1` states with zero-cost arcs.
pub fn build_linear_fsa(y: &PhoneTranscript, vocab: &PhoneVocab) -> Result<Fst> {
    let mut b = FstBuilder::acceptor(vocab.space());
    let mut s = b.add_state();
    b.set_start(s);
    for p in y.flat() {
        let next = b.add_state();
        b.add_arc(s, Arc::new(p, p, Weight::ONE, next));
        s = next;
    }
    b.set_final(s, Weight::ONE);
    b.freeze()
}
