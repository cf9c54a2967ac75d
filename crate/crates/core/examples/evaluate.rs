//! Scores linear and disfluency-aware alignments of one corrupted utterance
//! against its verbatim reference, at phone and word level.

use disfluent_align::align::{AlignConfig, Aligner, BetaPolicy};
use disfluent_align::eval::{score_alignment, EvalOptions, Level, MetricsReport, WordIds};
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{corrupt, random_reference, synth_emissions, CorruptOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let r = random_reference("u", &vocab, 12, &mut ChaCha8Rng::seed_from_u64(5));
    let e = synth_emissions(&r, &vocab, 0.9, 5)?;
    let c = corrupt(&r, &e, &vocab, &CorruptOptions { rate_tenths: vec![3], ..Default::default() }, 5)?;
    println!("planted: {:?}", c.specs.iter().map(|s| (s.kind, s.word)).collect::<Vec<_>>());

    let aligner = Aligner::new(vocab.clone(), AlignConfig::linear())?;
    let methods = [("linear", AlignConfig::linear()), ("ws", AlignConfig::weakly_supervised(BetaPolicy::Adaptive))];
    for level in [Level::Phone, Level::Word] {
        let opts = EvalOptions::for_level(level);
        println!("\n{level:?} level, tolerance {} ms", opts.tolerance_ms);
        for (name, cfg) in methods {
            let a = aligner.with_config(cfg).align(&c.emissions, &c.approximate)?.alignment;
            let t = score_alignment(&a, &c.verbatim, &vocab, &opts, &mut WordIds::default())?;
            let m = MetricsReport::from_tally(&t)?;
            println!(
                "{name:<7} P {:.3} R {:.3} F1 {:.3} R-val {:.3} overlap {:.3}",
                m.precision, m.recall, m.f1, m.r_value, m.overlap
            );
        }
    }
    Ok(())
}
