use std::sync::Arc;

use relevation::distributions::quantile_grid;
use relevation::entropy::{
    ce_sequence, conditional_expected_t, conditional_identities, cumulative_entropy,
    dynamic_cumulative_entropy, expected_mean_inactivity, pmvt_ce_step, pmvt_density,
    unconditional_identities,
};
use relevation::{make_distribution, Distribution, FamilySpec, IteratedSequence};

fn all_sequences() -> Vec<(char, IteratedSequence)> {
    FamilySpec::reference_letters()
        .into_iter()
        .map(|l| {
            let d = make_distribution(FamilySpec::reference(l).unwrap()).unwrap();
            (l, IteratedSequence::new(Arc::new(d)).unwrap())
        })
        .collect()
}

fn grid16(s: &IteratedSequence) -> Vec<f64> {
    quantile_grid(s.base().as_ref(), 16, 0.05, 0.95).unwrap()
}

#[test]
fn exponential_ce_series_oracle() {
    // CE = sum_{k>=2} 1/k^2 for the unit exponential.
    let series: f64 = (2..200_000).map(|k| 1.0 / (k as f64).powi(2)).sum::<f64>() + 1.0 / 200_000.0;
    let e = make_distribution(FamilySpec::Exponential { lambda: 1.0 }).unwrap();
    assert!((cumulative_entropy(&e).unwrap().value - series).abs() < 1e-9);
}

#[test]
fn unconditional_identities_all_families() {
    for (l, s) in all_sequences() {
        for n in 1..=3 {
            let u = unconditional_identities(&s, n).unwrap();
            assert!((u.expected_t.value - 1.0).abs() < 1e-8, "{l} n={n} E[T]={}", u.expected_t.value);
            assert!((u.cov_x_t.value + u.ce.value).abs() < 1e-7, "{l} n={n} cov");
            assert!((u.expected_t_over_tau.value - u.ce.value).abs() < 1e-7, "{l} n={n} T/tau");
            assert!((u.expected_mit.value - u.ce.value).abs() < 1e-8, "{l} n={n} mit");
        }
    }
}

#[test]
fn conditional_identities_on_grid() {
    for (l, s) in all_sequences() {
        for n in 1..=3 {
            for &t in &grid16(&s) {
                let c = conditional_identities(&s, n, t).unwrap();
                let (g1, g2) = c.gaps();
                assert!(g1 < 1e-7 && g2 < 1e-7, "{l} n={n} t={t}: {c:?}");
                let et = conditional_expected_t(&s, n, t).unwrap().value;
                assert!((et - 1.0 - s.t_n(n, t)).abs() < 1e-8, "{l} n={n} t={t}");
            }
        }
    }
}

#[test]
fn dynamic_ce_forms_agree_and_approach_ce() {
    for (l, s) in all_sequences() {
        let b = s.base();
        for &t in &grid16(&s) {
            let d = dynamic_cumulative_entropy(b.as_ref(), t).unwrap();
            assert!(d.gap() < 1e-8, "{l} t={t}");
            assert!(d.value.value >= 0.0);
            let cond = expected_mean_inactivity(b.as_ref(), t).unwrap().value;
            assert!((cond - d.value.value).abs() < 1e-8, "{l} t={t}");
        }
        let far = b.inverse_survival(1e-14).unwrap();
        let ce = cumulative_entropy(b.as_ref()).unwrap().value;
        assert!((dynamic_cumulative_entropy(b.as_ref(), far).unwrap().value.value - ce).abs() < 1e-6, "{l}");
    }
}

#[test]
fn ce_decreases_along_the_sequence() {
    for (l, s) in all_sequences() {
        let ces: Vec<f64> = (1..=4).map(|n| ce_sequence(&s, n).unwrap().value).collect();
        assert!(ces.windows(2).all(|w| w[1] < w[0]), "{l}: {ces:?}");
    }
}

#[test]
fn ce_is_mean_drop() {
    for (l, s) in all_sequences() {
        for n in 1..=4 {
            let drop = s.member(n).unwrap().mean().unwrap().value - s.member(n + 1).unwrap().mean().unwrap().value;
            assert!((ce_sequence(&s, n).unwrap().value - drop).abs() < 1e-6, "{l} n={n}");
        }
    }
}

#[test]
fn mean_value_route() {
    for (l, s) in all_sequences() {
        let z = pmvt_density(&s, 1).unwrap();
        assert!((z.total_mass().value - 1.0).abs() < 1e-8, "{l}");
        let next = ce_sequence(&s, 2).unwrap().value;
        let step = pmvt_ce_step(&s, 1).unwrap();
        assert!((step.theorem_route.value - next).abs() < 1e-5, "{l}: {step:?} vs {next}");
        assert!((step.rewritten_route.value - next).abs() < 1e-4, "{l}: {step:?} vs {next}");
    }
}
