use crate::error::Result;
use crate::graphs::PhoneVocab;
use crate::wfst::{Arc, Fst, FstBuilder, Label, Weight, EPSILON};

/// Standard CTC topology over every frame token of `vocab`.
///
/// State 0 is the blank state; every other frame token gets its own state.
/// Entering a token's state writes the token, staying in it writes nothing,
/// and a token can only be written twice in a row by passing through blank.
/// Every state is final and every cost is zero, so the transducer maps a frame
/// sequence to its CTC collapse.
pub fn build_ctc_topology(vocab: &PhoneVocab) -> Result<Fst> {
    let blank = vocab.blank_id();
    let units: Vec<Label> = vocab.frame_tokens().filter(|&t| t != blank).collect();
    let mut b = FstBuilder::new(vocab.space(), vocab.space());

    let mut state_of = vec![0u32; vocab.len() + 1];
    let blank_state = b.add_state();
    for &u in &units {
        state_of[u as usize] = b.add_state();
    }
    state_of[blank as usize] = blank_state;
    b.set_start(blank_state);

    let sources = std::iter::once(blank).chain(units.iter().copied());
    for from in sources {
        let s = state_of[from as usize];
        b.set_final(s, Weight::ONE);
        for tok in vocab.frame_tokens() {
            let arc = if tok == blank {
                Arc::new(blank, EPSILON, Weight::ONE, blank_state)
            } else if tok == from {
                Arc::new(tok, EPSILON, Weight::ONE, s)
            } else {
                Arc::new(tok, tok, Weight::ONE, state_of[tok as usize])
            };
            b.add_arc(s, arc);
        }
    }
    b.freeze()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wfst::{compose, shortest_path, trim};

    fn small_vocab() -> PhoneVocab {
        PhoneVocab::from_symbols(["[SIL]", "AA", "AE", "[UNK]", "[PAD]"]).unwrap()
    }

    fn collapse_through(v: &PhoneVocab, frames: &[&str]) -> Vec<String> {
        let mut b = FstBuilder::acceptor(v.space());
        let mut s = b.add_state();
        b.set_start(s);
        for f in frames {
            let n = b.add_state();
            let id = v.id(f).unwrap();
            b.add_arc(s, Arc::new(id, id, Weight::ONE, n));
            s = n;
        }
        b.set_final(s, Weight::ONE);
        let input = b.freeze().unwrap();
        let topo = build_ctc_topology(v).unwrap();
        let out = trim(&compose(&input, &topo).unwrap());
        let p = shortest_path(&out).unwrap();
        p.olabels().iter().map(|&l| v.symbol(l).unwrap().to_string()).collect()
    }

    #[test]
    fn repeat_split_by_blank() {
        let v = small_vocab();
        assert_eq!(collapse_through(&v, &["AA", "AA", "[SIL]", "AA"]), ["AA", "AA"]);
    }

    #[test]
    fn leading_blank_and_merge() {
        let v = small_vocab();
        assert_eq!(collapse_through(&v, &["[SIL]", "AA", "AA", "AE"]), ["AA", "AE"]);
    }

    #[test]
    fn shape() {
        let v = small_vocab();
        let t = build_ctc_topology(&v).unwrap();
        // blank state + AA, AE, UNK; each state has one arc per frame token
        assert_eq!(t.num_states(), 4);
        assert_eq!(t.num_arcs(), 16);
        assert!(t.states().all(|s| t.is_final(s)));
        let v = PhoneVocab::cmu();
        let t = build_ctc_topology(&v).unwrap();
        assert_eq!(t.num_states(), 41);
        assert_eq!(t.num_arcs(), 41 * 41);
    }
}
