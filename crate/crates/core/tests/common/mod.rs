#![allow(dead_code)]

use std::collections::BTreeMap;

use disfluent_align::graphs::{Ingest, LogProbMatrix, PhoneTranscript, PhoneVocab};
use disfluent_align::synth::{build_corpus, random_reference, Corpus, CorpusOptions, RefAlignment};
use disfluent_align::wfst::{Arc, Fst, FstBuilder, Label, TokenSpace, Weight, EPSILON};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn vocab() -> PhoneVocab {
    PhoneVocab::cmu()
}

pub fn references(
    vocab: &PhoneVocab,
    n: usize,
    words: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Vec<RefAlignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = rng.random_range(words.clone());
            random_reference(format!("utt{i:04}"), vocab, k, &mut rng)
        })
        .collect()
}

pub fn corpus(vocab: &PhoneVocab, n: usize, clean_fraction: f64, seed: u64) -> Corpus {
    let refs = references(vocab, n, 6..=12, seed);
    build_corpus(&refs, vocab, &CorpusOptions { seed, clean_fraction, ..Default::default() }).unwrap()
}

/// Random posteriors: a Dirichlet-ish row with one token boosted.
pub fn random_emissions(vocab: &PhoneVocab, frames: usize, rng: &mut impl Rng) -> LogProbMatrix {
    let n = vocab.len();
    let rows: Vec<Vec<f64>> = (0..frames)
        .map(|_| {
            let mut r: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
            let k = rng.random_range(0..n);
            r[k] += rng.random_range(0.0..20.0);
            let s: f64 = r.iter().sum();
            r.iter().map(|x| (x / s).ln()).collect()
        })
        .collect();
    LogProbMatrix::from_rows(&rows, 10.0, Ingest::Validate).unwrap()
}

pub fn random_transcript(vocab: &PhoneVocab, phones: usize, rng: &mut impl Rng) -> PhoneTranscript {
    let ids: Vec<Label> = vocab.phones().collect();
    let mut words = Vec::new();
    let mut left = phones;
    while left > 0 {
        let k = rng.random_range(1..=left.min(4));
        // A tiny alphabet makes repeated neighbours, which need a blank between them.
        words.push((0..k).map(|_| ids[rng.random_range(0..4)]).collect());
        left -= k;
    }
    PhoneTranscript::new(words, vocab).unwrap()
}

/// Random transducer over labels `0..=labels`, where 0 is epsilon. With
/// `acyclic`, arcs only go to higher-numbered states.
pub fn random_fst(states: usize, labels: Label, arcs: usize, acyclic: bool, rng: &mut impl Rng) -> Fst {
    let space = TokenSpace::new("sym");
    let mut b = FstBuilder::new(space.clone(), space);
    for _ in 0..states {
        b.add_state();
    }
    b.set_start(0);
    for s in 0..states as u32 {
        if rng.random_bool(0.35) || s as usize == states - 1 {
            b.set_final(s, Weight::new(rng.random_range(0..4) as f64 * 0.5));
        }
    }
    for _ in 0..arcs {
        let src = rng.random_range(0..states as u32);
        let dst = if acyclic {
            if src as usize + 1 >= states {
                continue;
            }
            rng.random_range(src + 1..states as u32)
        } else {
            rng.random_range(0..states as u32)
        };
        let lab =
            |rng: &mut dyn rand::RngCore| if rng.random_bool(0.3) { EPSILON } else { rng.random_range(1..=labels) };
        let (i, o) = (lab(rng), lab(rng));
        b.add_arc(src, Arc::new(i, o, Weight::new(rng.random_range(0..8) as f64 * 0.25), dst));
    }
    b.freeze().unwrap()
}

/// Every accepting path of an acyclic transducer, as the epsilon-free
/// `(input, output)` strings with the cheapest cost among paths producing them.
pub fn relation(f: &Fst) -> BTreeMap<(Vec<Label>, Vec<Label>), f64> {
    let mut out = BTreeMap::new();
    let Some(start) = f.start() else { return out };
    let mut stack = vec![(start, Vec::new(), Vec::new(), 0.0)];
    while let Some((s, i, o, c)) = stack.pop() {
        if f.is_final(s) {
            let c = c + f.final_weight(s).cost();
            let e = out.entry((i.clone(), o.clone())).or_insert(f64::INFINITY);
            *e = f64::min(*e, c);
        }
        for a in f.arcs(s) {
            let (mut i, mut o) = (i.clone(), o.clone());
            if a.ilabel != EPSILON {
                i.push(a.ilabel);
            }
            if a.olabel != EPSILON {
                o.push(a.olabel);
            }
            stack.push((a.next_state, i, o, c + a.weight.cost()));
        }
    }
    out
}

/// Relational composition of two enumerated relations.
pub fn compose_relations(
    a: &BTreeMap<(Vec<Label>, Vec<Label>), f64>,
    b: &BTreeMap<(Vec<Label>, Vec<Label>), f64>,
) -> BTreeMap<(Vec<Label>, Vec<Label>), f64> {
    let mut out = BTreeMap::new();
    for ((ai, ao), ac) in a {
        for ((bi, bo), bc) in b {
            if ao == bi {
                let e = out.entry((ai.clone(), bo.clone())).or_insert(f64::INFINITY);
                *e = f64::min(*e, ac + bc);
            }
        }
    }
    out
}
