mod common;

use disfluent_align::align::{adaptive_beta, force_align, viterbi_oracle, AlignConfig, Aligner, BetaPolicy, OerResult};
use disfluent_align::graphs::{backbone_cost, LogProbMatrix, PhoneVocab};
use disfluent_align::synth::{apply_disfluencies, synth_emissions, Disfluency, DisfluencyType};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(
    seed: u64,
    phones: usize,
    extra_frames: usize,
) -> (PhoneVocab, LogProbMatrix, disfluent_align::graphs::PhoneTranscript) {
    let v = common::vocab();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = common::random_transcript(&v, phones, &mut rng);
    let e = common::random_emissions(&v, y.min_frames() + extra_frames, &mut rng);
    (v, e, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cost_bound_across_beta(seed: u64, phones in 2usize..=6, extra in 0usize..=6) {
        let (v, e, y) = instance(seed, phones, extra);
        let a = Aligner::new(v, AlignConfig::weakly_supervised(BetaPolicy::Adaptive)).unwrap();
        let betas = [1.0, 2.0, 4.0, 8.0];
        let runs: Vec<_> = betas.iter().map(|&b| a.align_with_beta(&e, &y, b).unwrap()).collect();
        for i in 0..betas.len() {
            for j in i + 1..betas.len() {
                // Re-pricing the path chosen at the larger beta at the smaller one.
                let n = runs[j].realized_phones.len() as f64;
                let bound = runs[j].total_cost.cost() + n * (backbone_cost(betas[i]) - backbone_cost(betas[j]));
                prop_assert!(runs[i].total_cost.cost() <= bound + 1e-6, "beta {} vs {}", betas[i], betas[j]);
            }
        }
    }

    #[test]
    fn disfluency_arcs_cost_at_most_the_backbone_price(seed: u64, phones in 1usize..=6, extra in 0usize..=6, beta in 0.5f64..8.0) {
        let (v, e, y) = instance(seed, phones, extra);
        let a = Aligner::new(v, AlignConfig::weakly_supervised(BetaPolicy::Fixed(beta))).unwrap();
        let ws = a.align_with_beta(&e, &y, beta).unwrap().total_cost.cost();
        let lin = a.align_linear(&e, &y).unwrap().total_cost.cost();
        prop_assert!(ws <= lin + y.num_phones() as f64 * backbone_cost(beta) + 1e-6);
    }

    #[test]
    fn infinite_beta_is_the_linear_alignment(seed: u64, phones in 1usize..=6, extra in 0usize..=6) {
        let (v, e, y) = instance(seed, phones, extra);
        let a = Aligner::new(v, AlignConfig::linear()).unwrap();
        let ws = a.align_with_beta(&e, &y, f64::INFINITY).unwrap();
        let lin = a.align_linear(&e, &y).unwrap();
        prop_assert!((ws.total_cost.cost() - lin.total_cost.cost()).abs() <= 1e-6);
        prop_assert_eq!(ws.frame_labels, lin.frame_labels);
        prop_assert!(ws.events.is_empty());
    }

    #[test]
    fn oer_ignores_per_frame_offsets(seed: u64, phones in 1usize..=6, extra in 0usize..=8) {
        let (v, e, y) = instance(seed, phones, extra);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let offsets: Vec<f64> = (0..e.frames()).map(|_| rng.random_range(0.0..5.0)).collect();
        let shifted: Vec<f64> = e
            .values()
            .chunks(e.tokens())
            .zip(&offsets)
            .flat_map(|(row, c)| row.iter().map(move |x| x - c))
            .collect();
        let f = LogProbMatrix::from_scores(shifted, e.tokens(), e.frame_shift_ms()).unwrap();
        let a = Aligner::new(v, AlignConfig::default()).unwrap();
        let (o1, o2) = (a.oer(&e, &y).unwrap(), a.oer(&f, &y).unwrap());
        prop_assert_eq!(o1.decoded_phones, o2.decoded_phones);
        prop_assert_eq!(o1.oer, o2.oer);
    }

    #[test]
    fn adaptive_beta_stays_in_range(decoded in prop::collection::vec(1u32..8, 0..30), reference in prop::collection::vec(1u32..8, 1..12)) {
        let o = OerResult::new(decoded, &reference);
        let b = adaptive_beta(&o);
        prop_assert!((1.0..=10.0).contains(&b));
        prop_assert_eq!(o.clipped, o.oer > 1.0);
    }

    #[test]
    fn oer_is_zero_on_its_own_reference(reference in prop::collection::vec(1u32..8, 1..20)) {
        let o = OerResult::new(reference.clone(), &reference);
        prop_assert_eq!(o.oer, 0.0);
        prop_assert_eq!(adaptive_beta(&o), 10.0);
    }
}

#[test]
fn linear_alignment_recovers_synthetic_boundaries() {
    let v = common::vocab();
    for (i, r) in common::references(&v, 100, 2..=8, 21).iter().enumerate() {
        let e = synth_emissions(r, &v, 0.9, i as u64).unwrap();
        let y = r.transcript(&v).unwrap();
        let a = force_align(&e, &y, &v, &AlignConfig::linear()).unwrap().alignment;
        let want = r.segments();
        assert_eq!(a.segments.len(), want.len(), "{}", r.id);
        for (got, want) in a.segments.iter().zip(&want) {
            assert_eq!(got.phone, want.phone);
            assert!(got.start_frame.abs_diff(want.start_frame) <= 1, "{} onset", r.id);
            assert!(got.end_frame.abs_diff(want.end_frame) <= 1, "{} offset", r.id);
        }
        let oracle = viterbi_oracle(&e, &y, &v).unwrap();
        assert!((oracle.total_cost.cost() - a.total_cost.cost()).abs() < 1e-6);
    }
}

#[test]
fn planted_repetition_is_aligned_twice() {
    let v = common::vocab();
    for (i, r) in common::references(&v, 20, 4..=8, 22).iter().enumerate() {
        let e = synth_emissions(r, &v, 0.9, i as u64).unwrap();
        let word = 1 + i % (r.num_words() - 2);
        let c = apply_disfluencies(r, &e, &v, &[Disfluency { kind: DisfluencyType::W, word, amount: 1 }]).unwrap();
        let cfg = AlignConfig::weakly_supervised(BetaPolicy::Fixed(2.0));
        let a = force_align(&c.emissions, &c.approximate, &v, &cfg).unwrap().alignment;
        let passes: Vec<_> = a.words.iter().filter(|w| w.word_index == word).collect();
        assert_eq!(passes.len(), 2, "{}", r.id);
        assert!(passes.iter().all(|p| p.phones == c.approximate.words()[word]), "{}", r.id);
        assert!(passes[0].end_frame <= passes[1].start_frame, "{}", r.id);
        assert!(passes[0].start_frame.abs_diff(c.specs[0].start_frame) <= 1, "{}", r.id);
    }
}
