//! Plants a word repetition into one synthetic utterance and aligns it with
//! and without the disfluency arcs.

use disfluent_align::align::{AlignConfig, Aligner, Alignment, BetaPolicy};
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{apply_disfluencies, random_reference, synth_emissions, Disfluency, DisfluencyType};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(name: &str, a: &Alignment, vocab: &PhoneVocab) {
    println!("{name}: cost {:.2}", a.total_cost.cost());
    for w in &a.words {
        let phones: Vec<_> = w.phones.iter().map(|&p| vocab.symbol(p).unwrap_or("?")).collect();
        println!(
            "  word {} pass {} frames {:>3}..{:<3} {}",
            w.word_index,
            w.occurrence,
            w.start_frame,
            w.end_frame,
            phones.join(" ")
        );
    }
    for e in &a.events {
        println!("  event {:?} at frame {} on word {}", e.kind, e.frame, e.word_index);
    }
}

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let r = random_reference("demo", &vocab, 5, &mut ChaCha8Rng::seed_from_u64(3));
    let clean = synth_emissions(&r, &vocab, 0.9, 3)?;
    let c = apply_disfluencies(&r, &clean, &vocab, &[Disfluency { kind: DisfluencyType::W, word: 2, amount: 1 }])?;
    println!("transcript: {}", c.approximate.to_text(&vocab));
    println!("word 2 repeated in frames {}..{}\n", c.specs[0].start_frame, c.specs[0].end_frame);

    let aligner = Aligner::new(vocab.clone(), AlignConfig::linear())?;
    show("linear", &aligner.align_linear(&c.emissions, &c.approximate)?, &vocab);

    let ws = aligner.with_config(AlignConfig::weakly_supervised(BetaPolicy::Adaptive));
    let out = ws.align(&c.emissions, &c.approximate)?;
    println!();
    show(&format!("with disfluency arcs, beta {:.2}", out.beta.unwrap_or(f64::NAN)), &out.alignment, &vocab);
    print!("\n{}", out.alignment.to_tsv(&vocab));
    Ok(())
}
