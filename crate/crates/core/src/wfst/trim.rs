use crate::wfst::fst::ReverseArcs;
use crate::wfst::{Arc, Fst, StateId};

/// Removes every state that is not both reachable from the start and able to
/// reach a final state. Surviving states keep their relative order and arcs
/// keep their relative order within a state.
pub fn trim(f: &Fst) -> Fst {
    let n = f.num_states();
    let Some(start) = f.start() else {
        return f.clone();
    };

    let mut accessible = vec![false; n];
    let mut stack = vec![start];
    accessible[start as usize] = true;
    while let Some(s) = stack.pop() {
        for a in f.arcs(s) {
            let t = a.next_state as usize;
            if !accessible[t] {
                accessible[t] = true;
                stack.push(a.next_state);
            }
        }
    }

    let reverse = ReverseArcs::new(f, |_, _| true);
    let mut coaccessible = vec![false; n];
    let mut stack: Vec<StateId> = f.states().filter(|&s| f.is_final(s)).collect();
    for &s in &stack {
        coaccessible[s as usize] = true;
    }
    while let Some(s) = stack.pop() {
        for &(p, _) in reverse.incoming(s) {
            if !coaccessible[p as usize] {
                coaccessible[p as usize] = true;
                stack.push(p);
            }
        }
    }

    let keep: Vec<bool> = (0..n).map(|s| accessible[s] && coaccessible[s]).collect();
    if !keep[start as usize] {
        return Fst::empty(f.input_space().clone(), f.output_space().clone());
    }
    let mut remap = vec![StateId::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if keep[s] {
            remap[s] = next;
            next += 1;
        }
    }

    let mut arcs = Vec::with_capacity(f.num_arcs());
    let mut offsets = Vec::with_capacity(next as usize + 1);
    offsets.push(0);
    let mut finals = Vec::with_capacity(next as usize);
    for s in f.states().filter(|&s| keep[s as usize]) {
        arcs.extend(
            f.arcs(s)
                .iter()
                .filter(|a| keep[a.next_state as usize])
                .map(|a| Arc { next_state: remap[a.next_state as usize], ..*a }),
        );
        offsets.push(arcs.len());
        finals.push(f.final_weight(s));
    }
    Fst::from_flat(
        arcs,
        offsets,
        finals,
        Some(remap[start as usize]),
        f.input_space().clone(),
        f.output_space().clone(),
    )
}
