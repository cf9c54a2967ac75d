mod common;

use std::collections::BTreeMap;

use disfluent_align::graphs::log_sum_exp;
use disfluent_align::synth::{
    apply_disfluencies, build_corpus, corrupt, disfluency_count, synth_emissions, CorpusOptions, CorruptOptions,
    Disfluency, DisfluencyType,
};
use proptest::prelude::*;

/// Share of verbatim words per planted type, in percent.
const TYPE_SHARE_PCT: [(DisfluencyType, f64); 4] =
    [(DisfluencyType::PW, 4.7), (DisfluencyType::W, 4.8), (DisfluencyType::PH, 4.7), (DisfluencyType::D, 4.7)];
const TYPE_SHARE_TOLERANCE_PCT: f64 = 1.5;

#[test]
fn per_type_share_of_words() {
    let v = common::vocab();
    let c = common::corpus(&v, 400, 0.0, 31);
    let words: usize = c.utterances.iter().map(|u| u.verbatim.num_words()).sum();
    assert!(words >= 1000);
    let mut counts: BTreeMap<DisfluencyType, usize> = BTreeMap::new();
    for s in c.utterances.iter().flat_map(|u| &u.specs) {
        *counts.entry(s.kind).or_default() += 1;
    }
    for (t, want) in TYPE_SHARE_PCT {
        let pct = 100.0 * counts.get(&t).copied().unwrap_or(0) as f64 / words as f64;
        println!("{t}: {pct:.2}% of {words} words");
        assert!((pct - want).abs() <= TYPE_SHARE_TOLERANCE_PCT, "{t}: {pct:.2}%");
    }
}

#[test]
fn ten_words_at_one_in_five() {
    assert_eq!(disfluency_count(2, 10), 2);
    let v = common::vocab();
    let r = &common::references(&v, 1, 10..=10, 32)[0];
    let e = synth_emissions(r, &v, 0.9, 1).unwrap();
    let opts = CorruptOptions { rate_tenths: vec![2], ..Default::default() };
    for seed in 0..20 {
        let c = corrupt(r, &e, &v, &opts, seed).unwrap();
        assert_eq!(c.specs.len(), 2);
        assert_eq!(c.p, 0.2);
    }
}

#[test]
fn deletion_and_repeat_frame_counts() {
    let v = common::vocab();
    for (i, r) in common::references(&v, 30, 4..=9, 33).iter().enumerate() {
        let e = synth_emissions(r, &v, 0.9, i as u64).unwrap();
        let n = r.num_words();
        let w = i % (n - 1);
        // A deleted word takes its trailing silence with it.
        let d = apply_disfluencies(r, &e, &v, &[Disfluency { kind: DisfluencyType::D, word: w, amount: 1 }]).unwrap();
        assert_eq!(d.emissions.frames(), e.frames() - (r.word_start(w + 1) - r.word_start(w)));
        assert_eq!(d.verbatim.num_words(), n - 1);

        let copies = 1 + i % 3;
        let rep =
            apply_disfluencies(r, &e, &v, &[Disfluency { kind: DisfluencyType::W, word: w, amount: copies }]).unwrap();
        let target: Vec<_> = r.words()[w].iter().map(|p| p.phone).collect();
        let seen =
            rep.verbatim.words().iter().filter(|x| x.iter().map(|p| p.phone).collect::<Vec<_>>() == target).count();
        let before = r.words().iter().filter(|x| x.iter().map(|p| p.phone).collect::<Vec<_>>() == target).count();
        assert_eq!(seen, before + copies, "{}", r.id);
        let grown = rep.emissions.frames() - e.frames();
        let unit = r.word_start(w + 1) - r.word_start(w);
        // Splices between equal phones get one extra silent frame each.
        assert!(grown >= copies * unit && grown <= copies * (unit + 1), "{}", r.id);
    }
}

#[test]
fn manifest_is_identical_across_runs() {
    let v = common::vocab();
    let refs = common::references(&v, 100, 3..=10, 34);
    let opts = CorpusOptions { seed: 12, clean_fraction: 0.3, ..Default::default() };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        build_corpus(&refs, &v, &opts).unwrap().write(d.path(), &v).unwrap();
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("manifest.jsonl")).unwrap();
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn corruption_keeps_posteriors_and_frames_consistent(seed: u64, words in 2usize..=12, peak in 0.6f64..0.98) {
        let v = common::vocab();
        let r = &common::references(&v, 1, words..=words, seed)[0];
        let e = synth_emissions(r, &v, peak, seed).unwrap();
        let c = corrupt(r, &e, &v, &CorruptOptions::default(), seed).unwrap();
        for t in 0..c.emissions.frames() {
            prop_assert!(log_sum_exp(c.emissions.row(t)).abs() <= 1e-3);
        }
        prop_assert_eq!(c.verbatim.frames(), c.emissions.frames());
        prop_assert!(c.verbatim.segments().iter().all(|s| s.end_frame <= c.emissions.frames()));
        for s in &c.specs {
            prop_assert!(s.start_frame <= s.end_frame && s.end_frame <= c.emissions.frames());
        }
        prop_assert_eq!(&c, &corrupt(r, &e, &v, &CorruptOptions::default(), seed).unwrap());
    }
}

#[test]
fn short_utterances_always_find_room() {
    let v = common::vocab();
    let opts = CorruptOptions { rate_tenths: vec![3], ..Default::default() };
    for words in 2..=6 {
        for (i, r) in common::references(&v, 100, words..=words, words as u64).iter().enumerate() {
            let e = synth_emissions(r, &v, 0.9, i as u64).unwrap();
            let c = corrupt(r, &e, &v, &opts, i as u64).unwrap();
            assert_eq!(c.specs.len(), disfluency_count(3, words));
        }
    }
    let r = &common::references(&v, 1, 4..=4, 326426002909217925)[0];
    let e = synth_emissions(r, &v, 0.6, 326426002909217925).unwrap();
    assert!(corrupt(r, &e, &v, &CorruptOptions::default(), 326426002909217925).is_ok());
}
