use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::wfst::Weight;

pub type StateId = u32;
pub type Label = u32;

/// Label 0 is epsilon on both tapes.
pub const EPSILON: Label = 0;

/// Names the symbol table a tape draws its labels from. Composition refuses
/// to join tapes from different spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TokenSpace(String);

impl TokenSpace {
    pub fn new(name: impl Into<String>) -> Self {
        TokenSpace(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TokenSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub next_state: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: Weight, next_state: StateId) -> Self {
        Arc { ilabel, olabel, weight, next_state }
    }
}

/// Mutable graph under construction. Call [`FstBuilder::freeze`] to validate it
/// and obtain an [`Fst`] that the algorithms accept.
#[derive(Clone, Debug)]
pub struct FstBuilder {
    states: Vec<Vec<Arc>>,
    finals: Vec<Weight>,
    start: Option<StateId>,
    input_space: TokenSpace,
    output_space: TokenSpace,
}

impl FstBuilder {
    pub fn new(input_space: TokenSpace, output_space: TokenSpace) -> Self {
        FstBuilder { states: Vec::new(), finals: Vec::new(), start: None, input_space, output_space }
    }

    pub fn acceptor(space: TokenSpace) -> Self {
        Self::new(space.clone(), space)
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(Vec::new());
        self.finals.push(Weight::ZERO);
        (self.states.len() - 1) as StateId
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn set_start(&mut self, s: StateId) {
        self.start = Some(s);
    }

    pub fn set_final(&mut self, s: StateId, w: Weight) {
        self.finals[s as usize] = w;
    }

    pub fn add_arc(&mut self, src: StateId, arc: Arc) {
        self.states[src as usize].push(arc);
    }

    /// Checks the graph invariants and makes it immutable.
    pub fn freeze(self) -> Result<Fst> {
        let start = self.start.ok_or(Error::NoStart)?;
        let n = self.states.len();
        if start as usize >= n {
            return Err(Error::InvalidStateReference { from: start as usize, to: start as usize });
        }
        for (s, arcs) in self.states.iter().enumerate() {
            for a in arcs {
                if a.next_state as usize >= n {
                    return Err(Error::InvalidStateReference { from: s, to: a.next_state as usize });
                }
                if !a.weight.is_valid() {
                    return Err(Error::InvalidWeight(a.weight.cost()));
                }
            }
        }
        if let Some(w) = self.finals.iter().find(|w| !w.is_valid()) {
            return Err(Error::InvalidWeight(w.cost()));
        }
        Ok(Fst::from_parts(self.states, self.finals, Some(start), self.input_space, self.output_space))
    }
}

/// Free-function form of [`FstBuilder::freeze`].
pub fn freeze(builder: FstBuilder) -> Result<Fst> {
    builder.freeze()
}

/// A frozen weighted transducer over the tropical semiring.
///
/// A state is final when its final weight is finite-or-zero cost, i.e. not the
/// semiring zero. The only way to get an `Fst` without a start state is
/// trimming a graph whose language is empty.
#[derive(Clone, Debug)]
pub struct Fst {
    /// Arcs of state `s` are `arcs[offsets[s]..offsets[s + 1]]`.
    arcs: Vec<Arc>,
    offsets: Vec<usize>,
    finals: Vec<Weight>,
    start: Option<StateId>,
    input_space: TokenSpace,
    output_space: TokenSpace,
}

impl Fst {
    pub(crate) fn from_parts(
        states: Vec<Vec<Arc>>,
        finals: Vec<Weight>,
        start: Option<StateId>,
        input_space: TokenSpace,
        output_space: TokenSpace,
    ) -> Fst {
        let mut offsets = Vec::with_capacity(states.len() + 1);
        offsets.push(0);
        for s in &states {
            offsets.push(offsets.last().unwrap() + s.len());
        }
        let arcs = states.into_iter().flatten().collect();
        Fst::from_flat(arcs, offsets, finals, start, input_space, output_space)
    }

    pub(crate) fn from_flat(
        arcs: Vec<Arc>,
        offsets: Vec<usize>,
        finals: Vec<Weight>,
        start: Option<StateId>,
        input_space: TokenSpace,
        output_space: TokenSpace,
    ) -> Fst {
        debug_assert_eq!(offsets.len(), finals.len() + 1);
        debug_assert_eq!(*offsets.last().unwrap(), arcs.len());
        Fst { arcs, offsets, finals, start, input_space, output_space }
    }

    pub(crate) fn empty(input_space: TokenSpace, output_space: TokenSpace) -> Fst {
        Fst::from_flat(Vec::new(), vec![0], Vec::new(), None, input_space, output_space)
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.arcs[self.offsets[s as usize]..self.offsets[s as usize + 1]]
    }

    pub fn final_weight(&self, s: StateId) -> Weight {
        self.finals[s as usize]
    }

    pub fn is_final(&self, s: StateId) -> bool {
        !self.finals[s as usize].is_zero()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.finals.len() as StateId
    }

    pub fn input_space(&self) -> &TokenSpace {
        &self.input_space
    }

    pub fn output_space(&self) -> &TokenSpace {
        &self.output_space
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    /// Applies `f` to every arc and final weight. `f` must map valid weights
    /// to valid weights.
    pub fn map_weights(&self, f: impl Fn(Weight) -> Weight) -> Fst {
        let arcs = self.arcs.iter().map(|a| Arc { weight: f(a.weight), ..*a }).collect();
        let finals = self.finals.iter().map(|&w| if w.is_zero() { w } else { f(w) }).collect();
        Fst::from_flat(
            arcs,
            self.offsets.clone(),
            finals,
            self.start,
            self.input_space.clone(),
            self.output_space.clone(),
        )
    }

    /// Multiplies every cost by `scale` (a language-model weight in log space).
    pub fn scale_weights(&self, scale: f64) -> Fst {
        self.map_weights(|w| if w.is_zero() { w } else { Weight::new(w.cost() * scale) })
    }

    /// AT&T text form: `src dst ilabel olabel cost` per arc and `state cost`
    /// per final state. The start state's block is written first, so the
    /// first line's source is the start state.
    pub fn to_att(&self) -> String {
        let mut out = String::new();
        let Some(start) = self.start else {
            return out;
        };
        let order = std::iter::once(start).chain(self.states().filter(move |&s| s != start));
        for s in order {
            for a in self.arcs(s) {
                let _ = writeln!(out, "{} {} {} {} {}", s, a.next_state, a.ilabel, a.olabel, a.weight);
            }
            // A start state with nothing to write still has to come first.
            if self.is_final(s) || (s == start && self.arcs(s).is_empty()) {
                let _ = writeln!(out, "{} {}", s, self.final_weight(s));
            }
        }
        out
    }

    /// Parses the format written by [`Fst::to_att`]. A final line may omit its
    /// cost (meaning 0).
    pub fn parse_att(text: &str, input_space: TokenSpace, output_space: TokenSpace) -> Result<Fst> {
        let mut b = FstBuilder::new(input_space, output_space);
        let ensure = |b: &mut FstBuilder, s: StateId| {
            while b.num_states() <= s as usize {
                b.add_state();
            }
        };
        let bad = |line: usize, msg: &str| Error::Format(format!("line {}: {}", line + 1, msg));
        for (i, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let num = |k: usize| -> Result<u32> { fields[k].parse::<u32>().map_err(|_| bad(i, "expected an integer")) };
            let cost = |k: usize| -> Result<Weight> {
                fields[k].parse::<f64>().map(Weight::new).map_err(|_| bad(i, "expected a cost"))
            };
            match fields.len() {
                1 | 2 => {
                    let s = num(0)?;
                    ensure(&mut b, s);
                    let w = if fields.len() == 2 { cost(1)? } else { Weight::ONE };
                    b.set_final(s, w);
                    if b.start.is_none() {
                        b.set_start(s);
                    }
                }
                4 | 5 => {
                    let (src, dst) = (num(0)?, num(1)?);
                    ensure(&mut b, src.max(dst));
                    let w = if fields.len() == 5 { cost(4)? } else { Weight::ONE };
                    b.add_arc(src, Arc::new(num(2)?, num(3)?, w, dst));
                    if b.start.is_none() {
                        b.set_start(src);
                    }
                }
                _ => return Err(bad(i, "expected 1, 2, 4 or 5 fields")),
            }
        }
        b.freeze()
    }
}

/// Incoming arcs of every state in compressed form: the sources of arcs into
/// `s` are `sources[offsets[s]..offsets[s + 1]]`, paired with the arc.
pub(crate) struct ReverseArcs {
    offsets: Vec<usize>,
    sources: Vec<(StateId, Arc)>,
}

impl ReverseArcs {
    pub(crate) fn new(f: &Fst, keep: impl Fn(StateId, &Arc) -> bool) -> Self {
        let n = f.num_states();
        let mut offsets = vec![0usize; n + 1];
        for s in f.states() {
            for a in f.arcs(s).iter().filter(|a| keep(s, a)) {
                offsets[a.next_state as usize + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let placeholder = (0, Arc::new(EPSILON, EPSILON, Weight::ONE, 0));
        let mut sources = vec![placeholder; offsets[n]];
        for s in f.states() {
            for a in f.arcs(s).iter().filter(|a| keep(s, a)) {
                let slot = &mut fill[a.next_state as usize];
                sources[*slot] = (s, *a);
                *slot += 1;
            }
        }
        ReverseArcs { offsets, sources }
    }

    pub(crate) fn incoming(&self, s: StateId) -> &[(StateId, Arc)] {
        &self.sources[self.offsets[s as usize]..self.offsets[s as usize + 1]]
    }
}
