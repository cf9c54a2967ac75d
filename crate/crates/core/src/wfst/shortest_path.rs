use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::wfst::fst::ReverseArcs;
use crate::wfst::{Arc, Fst, Label, StateId, Weight, EPSILON};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathArc {
    pub source: StateId,
    /// Position of the arc in its source state's arc list.
    pub index: usize,
    pub arc: Arc,
}

/// An accepting path: arcs from the start state to a final state.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub arcs: Vec<PathArc>,
    pub final_state: StateId,
    /// Sum of the arc weights plus the final weight.
    pub total_cost: Weight,
}

impl Path {
    /// Input labels with epsilons removed.
    pub fn ilabels(&self) -> Vec<Label> {
        self.arcs.iter().map(|p| p.arc.ilabel).filter(|&l| l != EPSILON).collect()
    }

    /// Output labels with epsilons removed.
    pub fn olabels(&self) -> Vec<Label> {
        self.arcs.iter().map(|p| p.arc.olabel).filter(|&l| l != EPSILON).collect()
    }

    /// Checks that the arcs chain from `f`'s start to `final_state` and that
    /// `total_cost` matches the arc and final weights to 1e-9 relative.
    pub fn is_consistent_with(&self, f: &Fst) -> bool {
        let Some(mut s) = f.start() else {
            return false;
        };
        let mut cost = Weight::ONE;
        for p in &self.arcs {
            if p.source != s || f.arcs(s).get(p.index) != Some(&p.arc) {
                return false;
            }
            cost += p.arc.weight;
            s = p.arc.next_state;
        }
        if s != self.final_state || !f.is_final(s) {
            return false;
        }
        cost += f.final_weight(s);
        let (x, y) = (cost.cost(), self.total_cost.cost());
        (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
    }
}

#[derive(PartialEq)]
struct Entry(f64, StateId);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Finds a minimum-cost accepting path.
///
/// Costs must be non-negative, so cycles are allowed. Ties are broken
/// deterministically: among minimum-cost paths, those with the fewest arcs
/// are preferred, and among those the lexicographically smallest sequence of
/// arc indices wins.
pub fn shortest_path(f: &Fst) -> Result<Path> {
    let start = f.start().ok_or(Error::EmptyLanguage)?;
    let n = f.num_states();

    let reverse = ReverseArcs::new(f, |_, a| !a.weight.is_zero());

    // Cost to reach acceptance from each state.
    let mut dist: Vec<f64> = f.states().map(|s| f.final_weight(s).cost()).collect();
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Reverse<Entry>> =
        dist.iter().enumerate().filter(|(_, d)| d.is_finite()).map(|(s, &d)| Reverse(Entry(d, s as StateId))).collect();
    while let Some(Reverse(Entry(d, s))) = heap.pop() {
        if settled[s as usize] {
            continue;
        }
        settled[s as usize] = true;
        for (p, a) in reverse.incoming(s) {
            let p = *p;
            let cand = a.weight.cost() + d;
            if cand < dist[p as usize] {
                dist[p as usize] = cand;
                heap.push(Reverse(Entry(cand, p)));
            }
        }
    }
    if !dist[start as usize].is_finite() {
        return Err(Error::EmptyLanguage);
    }

    // Fewest arcs to acceptance using only cost-optimal moves. `dist[s]` was
    // computed as exactly `w + dist[next]` for its best arc, so exact float
    // comparison identifies optimal moves.
    let tight =
        |s: StateId, a: &Arc| !a.weight.is_zero() && a.weight.cost() + dist[a.next_state as usize] == dist[s as usize];
    let mut hops = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in f.states() {
        if dist[s as usize].is_finite() && f.final_weight(s).cost() == dist[s as usize] {
            hops[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &(p, ref a) in reverse.incoming(s) {
            if !tight(p, a) {
                continue;
            }
            if hops[p as usize] == usize::MAX {
                hops[p as usize] = hops[s as usize] + 1;
                queue.push_back(p);
            }
        }
    }

    let mut arcs = Vec::with_capacity(hops[start as usize]);
    let mut s = start;
    let mut total = Weight::ONE;
    while hops[s as usize] > 0 {
        let h = hops[s as usize];
        let (index, arc) = f
            .arcs(s)
            .iter()
            .enumerate()
            .find(|(_, a)| tight(s, a) && hops[a.next_state as usize] == h - 1)
            .expect("a state with finite hop count has an optimal successor");
        arcs.push(PathArc { source: s, index, arc: *arc });
        total += arc.weight;
        s = arc.next_state;
    }
    total += f.final_weight(s);
    Ok(Path { arcs, final_state: s, total_cost: total })
}
