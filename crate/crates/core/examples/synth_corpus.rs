//! Builds a small planted-truth corpus and writes it to a directory.
//!
//! Usage: `cargo run --example synth_corpus [OUT_DIR]`

use std::collections::BTreeMap;

use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{build_corpus, random_reference, CorpusOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/demo-corpus".into());
    let vocab = PhoneVocab::cmu();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let refs: Vec<_> = (0..20)
        .map(|i| {
            let n = rng.random_range(5..=10);
            random_reference(format!("utt{i:03}"), &vocab, n, &mut rng)
        })
        .collect();
    let corpus = build_corpus(&refs, &vocab, &CorpusOptions { seed: 7, clean_fraction: 0.25, ..Default::default() })?;
    corpus.write(&out, &vocab)?;

    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for s in corpus.utterances.iter().flat_map(|u| &u.specs) {
        *kinds.entry(s.kind.to_string()).or_default() += 1;
    }
    let clean = corpus.utterances.iter().filter(|u| u.clean).count();
    println!("wrote {} utterances ({clean} clean) to {out}", corpus.len());
    println!("planted: {kinds:?}");
    for u in corpus.utterances.iter().take(3) {
        let planted: Vec<_> = u.specs.iter().map(|s| format!("{}@{}", s.kind, s.word)).collect();
        println!("{} p={:?} frames={} planted=[{}]", u.id, u.p, u.emissions.frames(), planted.join(", "));
    }
    Ok(())
}
