//! Oracle error rate and the resulting beta as the planted disfluency rate
//! grows.

use disfluent_align::align::{adaptive_beta, AlignConfig, Aligner};
use disfluent_align::graphs::PhoneVocab;
use disfluent_align::synth::{corrupt, random_reference, synth_emissions, CorruptOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> disfluent_align::Result<()> {
    let vocab = PhoneVocab::cmu();
    let aligner = Aligner::new(vocab.clone(), AlignConfig::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    println!("{:>4} {:>6} {:>6}", "p", "oer", "beta");
    for tenths in [0, 1, 2, 3, 5] {
        let r = random_reference("u", &vocab, 10, &mut rng);
        let e = synth_emissions(&r, &vocab, 0.9, tenths as u64)?;
        let (e, y) = if tenths == 0 {
            (e, r.transcript(&vocab)?)
        } else {
            let c = corrupt(&r, &e, &vocab, &CorruptOptions { rate_tenths: vec![tenths], ..Default::default() }, 1)?;
            (c.emissions, c.approximate)
        };
        let o = aligner.oer(&e, &y)?;
        println!("{:>4.1} {:>6.3} {:>6.2}", tenths as f64 / 10.0, o.oer, adaptive_beta(&o));
    }
    Ok(())
}
