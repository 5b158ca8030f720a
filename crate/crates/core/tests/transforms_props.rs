use std::sync::Arc;

use proptest::prelude::*;
use relevation::distributions::quantile_grid;
use relevation::transforms::{
    check_commutativity, phr_closed_form, prhr_closed_form, relevation, reversed_relevation,
    verify_st_bounds, Flavor, ProportionalModel, TransformKind,
};
use relevation::{make_distribution, Distribution, FamilySpec};

fn dist(l: char) -> Arc<dyn Distribution> {
    Arc::new(make_distribution(FamilySpec::reference(l).unwrap()).unwrap())
}

#[test]
fn outputs_are_monotone_and_reach_limits() {
    for (g, f) in [('d', 'e'), ('a', 'a'), ('b', 'c'), ('e', 'f')] {
        let rev = reversed_relevation(dist(g), dist(f));
        let rel = relevation(dist(g), dist(f));
        let grid = quantile_grid(dist(f).as_ref(), 64, 1e-3, 1.0 - 1e-3).unwrap();
        let cdfs: Vec<f64> = grid.iter().map(|&x| rev.cdf(x)).collect();
        let survs: Vec<f64> = grid.iter().map(|&x| rel.survival(x)).collect();
        assert!(cdfs.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{g}{f}");
        assert!(survs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{g}{f}");
        let far = dist(g).inverse_survival(1e-13).unwrap().max(dist(f).inverse_survival(1e-13).unwrap());
        assert!((rev.cdf(far) - 1.0).abs() < 1e-8, "{g}{f}");
        assert!((rel.survival(0.0) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn stochastic_bounds_for_builtin_pairs() {
    let letters = FamilySpec::reference_letters();
    for &g in &letters {
        for &f in &letters {
            let grid = quantile_grid(dist(f).as_ref(), 32, 0.01, 0.99).unwrap();
            let b = verify_st_bounds(dist(f), dist(g), &grid);
            assert!(b.lower.holds(), "{g}{f} lower {:?}", b.lower);
            assert!(b.upper.holds(), "{g}{f} upper {:?}", b.upper);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn proportional_pairs_commute(theta in 0.2f64..5.0, l in 0usize..6) {
        let letter = FamilySpec::reference_letters()[l];
        let base = dist(letter);
        let grid = quantile_grid(base.as_ref(), 32, 0.02, 0.98).unwrap();
        let prhr: Arc<dyn Distribution> = Arc::new(ProportionalModel::new(base.clone(), theta, Flavor::ReversedHazards).unwrap());
        let r = check_commutativity(base.clone(), prhr, TransformKind::ReversedRelevation, &grid, 1e-8);
        prop_assert!(r.commutes, "{:?}", r);
        let phr: Arc<dyn Distribution> = Arc::new(ProportionalModel::new(base.clone(), theta, Flavor::Hazards).unwrap());
        let r = check_commutativity(base, phr, TransformKind::Relevation, &grid, 1e-8);
        prop_assert!(r.commutes, "{:?}", r);
    }

    #[test]
    fn closed_forms_are_probabilities(theta in 0.05f64..20.0, x in 0.001f64..10.0) {
        let base = dist('d');
        let p = prhr_closed_form(&ProportionalModel::new(base.clone(), theta, Flavor::ReversedHazards).unwrap(), x).unwrap();
        let q = phr_closed_form(&ProportionalModel::new(base, theta, Flavor::Hazards).unwrap(), x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&q));
    }
}
