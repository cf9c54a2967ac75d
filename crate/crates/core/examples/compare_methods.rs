//! Linear alignment against fixed and adaptive beta on a mixed corpus, with
//! reductions relative to aligning the verbatim transcripts.

use disfluent_align::align::{AlignConfig, Aligner, BetaPolicy};
use disfluent_align::eval::{format_table, EvalOptions, Level};
use disfluent_align::experiment::{Experiment, Transcript};
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{build_corpus, random_reference, CorpusOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let refs: Vec<_> = (0..40)
        .map(|i| {
            let n = rng.random_range(6..=12);
            random_reference(format!("u{i}"), &vocab, n, &mut rng)
        })
        .collect();
    let corpus = build_corpus(&refs, &vocab, &CorpusOptions { seed: 2, ..Default::default() })?;
    let exp =
        Experiment::new(&corpus, Aligner::new(vocab, AlignConfig::linear())?, EvalOptions::for_level(Level::Phone));

    let methods = [
        ("linear", AlignConfig::linear()),
        ("ws beta=1", AlignConfig::weakly_supervised(BetaPolicy::Fixed(1.0))),
        ("ws beta=4", AlignConfig::weakly_supervised(BetaPolicy::Fixed(4.0))),
        ("ws adaptive", AlignConfig::weakly_supervised(BetaPolicy::Adaptive)),
    ];
    let mut rows = Vec::new();
    for (name, cfg) in methods {
        let verbatim = exp.run(&cfg, Transcript::Verbatim).report()?;
        let approx = exp.run(&cfg, Transcript::Approximate).report()?;
        rows.push((name.to_string(), approx.with_reductions(&verbatim)));
    }
    print!("{}", format_table(&rows));
    Ok(())
}
