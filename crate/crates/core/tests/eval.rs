mod common;

use disfluent_align::eval::{
    boundary_metrics, match_boundaries, severity_report, BoundarySet, Level, Matching, MetricsReport, Tally, METRICS,
};
use proptest::prelude::*;

fn set(items: Vec<(u32, usize)>) -> BoundarySet {
    let mut items = items;
    items.sort_by_key(|&(_, t)| t);
    BoundarySet::new(Level::Phone, items).unwrap()
}

fn items() -> impl Strategy<Value = Vec<(u32, usize)>> {
    prop::collection::vec((0u32..3, 0usize..60), 0..14)
}

/// Maximum one-to-one matching of same-label boundaries within `reach`
/// frames, by augmenting paths.
fn max_matching(pred: &[(u32, usize)], reference: &[(u32, usize)], reach: usize) -> usize {
    fn augment(p: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &r in &adj[p] {
            if !seen[r] {
                seen[r] = true;
                if owner[r].is_none_or(|q| augment(q, adj, owner, seen)) {
                    owner[r] = Some(p);
                    return true;
                }
            }
        }
        false
    }
    let adj: Vec<Vec<usize>> = pred
        .iter()
        .map(|&(l, t)| {
            (0..reference.len()).filter(|&k| reference[k].0 == l && reference[k].1.abs_diff(t) <= reach).collect()
        })
        .collect();
    let mut owner = vec![None; reference.len()];
    (0..pred.len()).filter(|&p| augment(p, &adj, &mut owner, &mut vec![false; reference.len()])).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn greedy_finds_a_maximum_matching(p in items(), r in items(), tol in prop_oneof![Just(0.0), Just(20.0), Just(40.0), Just(100.0)]) {
        let (ps, rs) = (set(p), set(r));
        let c = match_boundaries(&ps, &rs, tol, 10.0, Matching::Greedy).unwrap();
        prop_assert_eq!(c.hits, max_matching(ps.items(), rs.items(), (tol / 10.0) as usize));
        prop_assert!(c.hits <= c.n_pred.min(c.n_ref));
        let nearest = match_boundaries(&ps, &rs, tol, 10.0, Matching::Nearest).unwrap();
        prop_assert!(nearest.hits <= c.hits);
    }

    #[test]
    fn metrics_lie_in_the_unit_interval(p in items(), r in items()) {
        prop_assume!(!r.is_empty());
        let m = boundary_metrics(&set(p), &set(r), 40.0, 10.0, Matching::Greedy).unwrap();
        for x in [m.precision, m.recall, m.f1, m.r_value] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn swapping_sets_swaps_precision_and_recall(p in items(), r in items()) {
        prop_assume!(!p.is_empty() && !r.is_empty());
        let (ps, rs) = (set(p), set(r));
        let a = boundary_metrics(&ps, &rs, 40.0, 10.0, Matching::Greedy).unwrap();
        let b = boundary_metrics(&rs, &ps, 40.0, 10.0, Matching::Greedy).unwrap();
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        prop_assert_eq!(a.f1, b.f1);
    }

    #[test]
    fn common_shift_changes_nothing(p in items(), r in items(), offset in 0usize..500, nearest: bool) {
        prop_assume!(!r.is_empty());
        let m = if nearest { Matching::Nearest } else { Matching::Greedy };
        let (ps, rs) = (set(p), set(r));
        let a = match_boundaries(&ps, &rs, 40.0, 10.0, m).unwrap();
        let b = match_boundaries(&ps.shifted(offset), &rs.shifted(offset), 40.0, 10.0, m).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn perfect_r_value_only_for_perfect_detection(p in items(), r in items()) {
        prop_assume!(!r.is_empty());
        let m = boundary_metrics(&set(p), &set(r), 40.0, 10.0, Matching::Greedy).unwrap();
        prop_assert_eq!(m.r_value == 1.0, m.precision == 1.0 && m.recall == 1.0);
    }

    #[test]
    fn severity_buckets_partition_by_rate(rates in prop::collection::vec(1u32..=3, 1..40), hits in prop::collection::vec(0usize..=5, 40)) {
        let entries: Vec<_> = rates
            .iter()
            .zip(&hits)
            .map(|(&t, &h)| (Some(t as f64 / 10.0), tally(h, 5), tally(5, 5)))
            .collect();
        let rows = severity_report(&entries).unwrap();
        prop_assert_eq!(rows.iter().map(|r| r.utterances).sum::<usize>(), rates.len());
        for row in &rows {
            let n = rates.iter().filter(|&&t| t as f64 / 10.0 == row.p).count();
            prop_assert_eq!(row.utterances, n);
        }
        prop_assert!(rows.windows(2).all(|w| w[0].p < w[1].p));
    }
}

fn tally(hits: usize, n: usize) -> Tally {
    let mut t = Tally { frames_correct: hits, frames: n, ..Default::default() };
    t.boundaries.hits = hits;
    t.boundaries.n_pred = n;
    t.boundaries.n_ref = n;
    t
}

#[test]
fn clean_corpus_has_no_reductions() {
    let entries: Vec<_> = (0..30).map(|i| (Some((1 + i % 3) as f64 / 10.0), tally(4, 6), tally(4, 6))).collect();
    for row in severity_report(&entries).unwrap() {
        for m in METRICS {
            assert_eq!(row.report.reduction(m), Some(0.0), "{} {m}", row.label);
        }
    }
    let r = MetricsReport::from_tally(&tally(3, 6)).unwrap();
    assert!(METRICS.iter().all(|m| r.clone().with_reductions(&r).reduction(m) == Some(0.0)));
}
