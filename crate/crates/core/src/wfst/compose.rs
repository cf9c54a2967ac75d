use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::wfst::{Arc, Fst, StateId, EPSILON};

/// Epsilon-filter state. Between two synchronised moves, every move of the
/// left graph alone (on an output epsilon) comes before every move of the
/// right graph alone (on an input epsilon); `Right` records that the right
/// graph has started moving. Simultaneous epsilon moves are never taken. This
/// leaves exactly one composed path per pair of component paths.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
#[repr(u8)]
enum Filter {
    Free,
    Right,
}

/// Composes `a` with `b`, matching `a`'s output tape against `b`'s input tape.
///
/// The result reads `a`'s input and writes `b`'s output; the cost of a composed
/// path is the sum of the two component path costs. Only states reachable from
/// the start are built; the result is not trimmed.
pub fn compose(a: &Fst, b: &Fst) -> Result<Fst> {
    if a.output_space() != b.input_space() {
        return Err(Error::AlphabetMismatch { left: a.output_space().to_string(), right: b.input_space().to_string() });
    }
    let in_space = a.input_space().clone();
    let out_space = b.output_space().clone();
    let (Some(sa), Some(sb)) = (a.start(), b.start()) else {
        return Ok(Fst::empty(in_space, out_space));
    };

    let a_sorted = sorted_arcs(a, |arc| arc.olabel);
    let b_sorted = sorted_arcs(b, |arc| arc.ilabel);

    let mut index = StateIndex::new(a.num_states(), b.num_states());
    let mut tuples: Vec<(StateId, StateId, Filter)> = Vec::new();
    let mut out: Vec<Arc> = Vec::new();
    let mut offsets = vec![0usize];
    let mut finals = Vec::new();

    let mut intern = |t: (StateId, StateId, Filter), tuples: &mut Vec<(StateId, StateId, Filter)>| -> StateId {
        index.get_or_insert(t, || {
            tuples.push(t);
            (tuples.len() - 1) as StateId
        })
    };

    intern((sa, sb, Filter::Free), &mut tuples);
    let mut next = 0usize;
    while next < tuples.len() {
        let (qa, qb, filter) = tuples[next];
        let a_arcs = a.arcs(qa);
        let b_arcs = b.arcs(qb);
        let a_idx = &a_sorted[qa as usize];
        let b_idx = &b_sorted[qb as usize];

        let a_eps_end = a_idx.partition_point(|&i| a_arcs[i as usize].olabel == EPSILON);
        let b_eps_end = b_idx.partition_point(|&i| b_arcs[i as usize].ilabel == EPSILON);

        // Synchronised moves on matching non-epsilon labels (merge join).
        let (mut i, mut j) = (a_eps_end, b_eps_end);
        while i < a_idx.len() && j < b_idx.len() {
            let la = a_arcs[a_idx[i] as usize].olabel;
            let lb = b_arcs[b_idx[j] as usize].ilabel;
            if la < lb {
                i += 1;
            } else if lb < la {
                j += 1;
            } else {
                let i_end = i + a_idx[i..].partition_point(|&k| a_arcs[k as usize].olabel == la);
                let j_end = j + b_idx[j..].partition_point(|&k| b_arcs[k as usize].ilabel == la);
                for &ka in &a_idx[i..i_end] {
                    let x = &a_arcs[ka as usize];
                    for &kb in &b_idx[j..j_end] {
                        let y = &b_arcs[kb as usize];
                        let dst = intern((x.next_state, y.next_state, Filter::Free), &mut tuples);
                        out.push(Arc::new(x.ilabel, y.olabel, x.weight.times(y.weight), dst));
                    }
                }
                i = i_end;
                j = j_end;
            }
        }

        if filter == Filter::Free {
            for &ka in &a_idx[..a_eps_end] {
                let x = &a_arcs[ka as usize];
                let dst = intern((x.next_state, qb, Filter::Free), &mut tuples);
                out.push(Arc::new(x.ilabel, EPSILON, x.weight, dst));
            }
        }
        // If `a` can never move alone from here there is nothing to order.
        let after_right = if a_eps_end == 0 { Filter::Free } else { Filter::Right };
        for &kb in &b_idx[..b_eps_end] {
            let y = &b_arcs[kb as usize];
            let dst = intern((qa, y.next_state, after_right), &mut tuples);
            out.push(Arc::new(EPSILON, y.olabel, y.weight, dst));
        }

        offsets.push(out.len());
        finals.push(a.final_weight(qa).times(b.final_weight(qb)));
        next += 1;
    }

    Ok(Fst::from_flat(out, offsets, finals, Some(0), in_space, out_space))
}

/// Maps state triples to composed ids: a flat table when the product space
/// is small, a hash map otherwise.
enum StateIndex {
    Dense { table: Vec<StateId>, b_states: usize },
    Sparse(HashMap<(StateId, StateId, Filter), StateId>),
}

const DENSE_LIMIT: usize = 1 << 24;

impl StateIndex {
    fn new(a_states: usize, b_states: usize) -> Self {
        match a_states.checked_mul(b_states).and_then(|n| n.checked_mul(2)) {
            Some(n) if n <= DENSE_LIMIT => StateIndex::Dense { table: vec![StateId::MAX; n], b_states },
            _ => StateIndex::Sparse(HashMap::new()),
        }
    }

    fn get_or_insert(&mut self, t: (StateId, StateId, Filter), make: impl FnOnce() -> StateId) -> StateId {
        match self {
            StateIndex::Dense { table, b_states } => {
                let slot = &mut table[(t.0 as usize * *b_states + t.1 as usize) * 2 + t.2 as usize];
                if *slot == StateId::MAX {
                    *slot = make();
                }
                *slot
            }
            StateIndex::Sparse(map) => *map.entry(t).or_insert_with(make),
        }
    }
}

/// Per state, arc indices ordered by `key` (epsilon first), ties by index.
fn sorted_arcs(f: &Fst, key: impl Fn(&Arc) -> u32) -> Vec<Vec<u32>> {
    f.states()
        .map(|s| {
            let arcs = f.arcs(s);
            let mut idx: Vec<u32> = (0..arcs.len() as u32).collect();
            idx.sort_by_key(|&i| (key(&arcs[i as usize]), i));
            idx
        })
        .collect()
}
