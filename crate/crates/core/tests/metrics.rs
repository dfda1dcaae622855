mod common;

use common::{count, random_input, tally};
use fairtree::metrics::{accuracy, disparate_impact, equalized_odds_difference, full_report};
use fairtree::{Metric, MetricsError};
use proptest::prelude::*;

#[test]
fn full_report_matches_brute_force_tally() {
    let mut r = common::rng(21);
    let mut checked = 0;
    while checked < 1000 {
        let (y, p, g) = random_input(&mut r);
        let both_groups = g.contains(&0) && g.contains(&1);
        let report = full_report(&y, &p, &g);
        if !both_groups {
            assert!(matches!(report, Err(MetricsError::MissingGroup(_))));
            assert!(report.unwrap_err().to_string().contains("both groups required"));
            continue;
        }
        let report = report.unwrap();
        let t = tally(&y, &p, &g);
        assert_eq!(report.accuracy, t.accuracy);
        assert_eq!(report.eod.value(), t.eod);
        assert_eq!(report.di.value(), t.di);
        assert_eq!(report.di_distance.value(), t.di.map(|d| (1.0 - d).abs()));
        assert_eq!(report.n_samples, y.len());
        assert_eq!(report.warnings.len(), usize::from(t.eod.is_none()) + usize::from(t.di.is_none()));
        let gc = report.group_confusion;
        assert_eq!(gc.privileged.n() + gc.unprivileged.n(), y.len() as u64);
        assert_eq!(gc.privileged.tp as usize, count(&y, &p, &g, |a, b, c| a == 1 && b == 1 && c == 1));
        assert_eq!(gc.unprivileged.fn_ as usize, count(&y, &p, &g, |a, b, c| a == 1 && b == 0 && c == 0));
        assert_eq!(accuracy(&y, &p).unwrap(), t.accuracy);
        assert_eq!(equalized_odds_difference(&y, &p, &g).unwrap().value(), t.eod);
        assert_eq!(disparate_impact(&p, &g).unwrap().value(), t.di);
        checked += 1;
    }
}

fn input() -> impl Strategy<Value = (Vec<u8>, Vec<u8>, Vec<u8>)> {
    (2usize..=20).prop_flat_map(|n| {
        let bits = || prop::collection::vec(0u8..2, n);
        (bits(), bits(), bits()).prop_filter("both groups", |(_, _, g)| g.contains(&0) && g.contains(&1))
    })
}

proptest! {
    #[test]
    fn metrics_are_permutation_invariant((y, p, g) in input(), seed: u64) {
        let mut order: Vec<usize> = (0..y.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut common::rng(seed));
        let pick = |v: &[u8]| order.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let a = full_report(&y, &p, &g).unwrap();
        let b = full_report(&pick(&y), &pick(&p), &pick(&g)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn swapping_groups_keeps_eod_and_inverts_di((y, p, g) in input()) {
        let swapped: Vec<u8> = g.iter().map(|&v| 1 - v).collect();
        let a = full_report(&y, &p, &g).unwrap();
        let b = full_report(&y, &p, &swapped).unwrap();
        prop_assert_eq!(a.eod.value(), b.eod.value());
        if let (Some(x), Some(z)) = (a.di.value(), b.di.value()) {
            prop_assert!((x * z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eod_is_within_unit_interval((y, p, g) in input()) {
        if let Metric::Defined(e) = full_report(&y, &p, &g).unwrap().eod {
            prop_assert!((0.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn perfect_predictions_have_zero_eod((y, g) in input().prop_map(|(y, _, g)| (y, g))) {
        if let Metric::Defined(e) = full_report(&y, &y, &g).unwrap().eod {
            prop_assert_eq!(e, 0.0);
        }
    }
}
