//! F1 reduction per disfluency rate for linear and adaptive alignment.

use disfluent_align::align::{AlignConfig, Aligner, BetaPolicy};
use disfluent_align::eval::{EvalOptions, Level};
use disfluent_align::experiment::Experiment;
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{build_corpus, random_reference, CorpusOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let refs: Vec<_> = (0..60)
        .map(|i| {
            let n = rng.random_range(6..=12);
            random_reference(format!("u{i}"), &vocab, n, &mut rng)
        })
        .collect();
    let corpus = build_corpus(&refs, &vocab, &CorpusOptions { seed: 8, ..Default::default() })?;
    let exp =
        Experiment::new(&corpus, Aligner::new(vocab, AlignConfig::linear())?, EvalOptions::for_level(Level::Phone));

    println!("{:<10} {:>3} {:>10} {:>10}", "bucket", "n", "linear", "adaptive");
    let linear = exp.severity(&AlignConfig::linear())?;
    let adaptive = exp.severity(&AlignConfig::weakly_supervised(BetaPolicy::Adaptive))?;
    for (l, a) in linear.iter().zip(&adaptive) {
        let pct = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.1}%"));
        println!("{:<10} {:>3} {:>10} {:>10}", l.label, l.utterances, pct(l.f1_reduction()), pct(a.f1_reduction()));
    }
    Ok(())
}
