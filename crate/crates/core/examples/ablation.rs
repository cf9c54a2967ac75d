//! Switches the disfluency arc classes off one and two at a time.

use disfluent_align::align::{AlignConfig, Aligner, BetaPolicy};
use disfluent_align::eval::{format_table, EvalOptions, Level};
use disfluent_align::experiment::Experiment;
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{build_corpus, random_reference, CorpusOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let refs: Vec<_> = (0..30)
        .map(|i| {
            let n = rng.random_range(6..=12);
            random_reference(format!("u{i}"), &vocab, n, &mut rng)
        })
        .collect();
    let corpus = build_corpus(&refs, &vocab, &CorpusOptions { seed: 4, ..Default::default() })?;
    let exp =
        Experiment::new(&corpus, Aligner::new(vocab, AlignConfig::linear())?, EvalOptions::for_level(Level::Phone));
    // Reductions are relative to the row with every arc class enabled.
    print!("{}", format_table(&exp.ablation(BetaPolicy::Adaptive)?));
    Ok(())
}
