use std::sync::Arc;

use proptest::prelude::*;
use relevation::distributions::{integrate_support, quantile_grid};
use relevation::sequence::{t_iterate, t_step};
use relevation::{make_distribution, Distribution, FamilySpec, IteratedSequence, Tolerance};

fn all_sequences() -> Vec<(char, IteratedSequence)> {
    FamilySpec::reference_letters()
        .into_iter()
        .map(|l| {
            let d = make_distribution(FamilySpec::reference(l).unwrap()).unwrap();
            (l, IteratedSequence::new(Arc::new(d)).unwrap())
        })
        .collect()
}

#[test]
fn members_are_stochastically_decreasing() {
    for (l, s) in all_sequences() {
        for n in 1..=5 {
            let (a, b) = (s.member(n).unwrap(), s.member(n + 1).unwrap());
            for &x in s.grid() {
                assert!(b.cdf(x) >= a.cdf(x), "{l} n={n} x={x}");
            }
        }
    }
}

#[test]
fn cdf_is_exp_minus_t() {
    for (l, s) in all_sequences() {
        for n in 1..=5 {
            let m = s.member(n).unwrap();
            for &x in s.grid() {
                let c = m.cdf(x);
                if c > 1e-300 {
                    let t = s.t_n(n, x);
                    assert!(((-t).exp() - c).abs() <= 1e-12 * c, "{l} n={n} x={x}");
                }
            }
        }
    }
}

#[test]
fn density_and_hazard_ratios() {
    for (l, s) in all_sequences() {
        for n in 1..=4 {
            let (a, b) = (s.member(n).unwrap(), s.member(n + 1).unwrap());
            for &x in s.grid().iter().step_by(8) {
                let t = s.t_n(n, x);
                let (fa, fb) = (a.pdf(x), b.pdf(x));
                if fa > 1e-200 {
                    assert!((fb / fa - t).abs() <= 1e-10 * t.max(1e-300), "{l} n={n} x={x}");
                }
                if let (Ok(ta), Ok(tb)) = (a.reversed_hazard(x), b.reversed_hazard(x)) {
                    let expected = t / (1.0 + t);
                    assert!((tb / ta - expected).abs() <= 1e-10 * expected, "{l} n={n} x={x}");
                }
            }
        }
    }
}

#[test]
fn densities_integrate_to_one() {
    for (l, s) in all_sequences() {
        for n in 1..=5 {
            let m = s.member(n).unwrap();
            let r = integrate_support(&m, |x| m.pdf(x), &Tolerance::default());
            assert!((r.value - 1.0).abs() < 1e-8, "{l} n={n}: {}", r.value);
        }
    }
}

#[test]
fn mean_recursion_matches_direct_quadrature() {
    for (l, s) in all_sequences() {
        for n in 1..=5 {
            let m = s.mean_n(n).unwrap();
            assert!(m.direct.converged && m.recursion.converged);
            assert!(m.gap() < 1e-6, "{l} n={n}: gap {}", m.gap());
        }
    }
}

#[test]
fn mean_inactivity_recursion_on_grid() {
    for (l, s) in all_sequences() {
        let grid = quantile_grid(s.base().as_ref(), 16, 0.05, 0.95).unwrap();
        for n in 1..=3 {
            for &t in &grid {
                let r = s.mean_inactivity_n(n, t).unwrap();
                assert!(r.gap() < 1e-6, "{l} n={n} t={t}: {r:?}");
            }
        }
    }
}

#[test]
fn consecutive_covariance_scales_with_square() {
    let narrow = make_distribution(FamilySpec::Uniform { b: 2.0 }).unwrap();
    let wide = make_distribution(FamilySpec::Uniform { b: 6.0 }).unwrap();
    let a = IteratedSequence::new(Arc::new(narrow)).unwrap().cov_consecutive(2).unwrap();
    let b = IteratedSequence::new(Arc::new(wide)).unwrap().cov_consecutive(2).unwrap();
    assert!((b.value - 9.0 * a.value).abs() < 1e-7, "{} vs {}", b.value, 9.0 * a.value);
}

proptest! {
    #[test]
    fn t_iterate_is_nonincreasing_and_bounded(t1 in 0.0f64..50.0, n in 1usize..12) {
        let a = t_iterate(t1, n);
        let b = t_iterate(t1, n + 1);
        prop_assert!(b <= a);
        prop_assert!(a >= 0.0 && a <= t1);
    }

    #[test]
    fn t_step_is_exact_recursion(u in 1e-8f64..1e3) {
        // Oracle: log1p difference, accurate away from tiny u.
        let direct = u - u.ln_1p();
        let tol = if u > 0.5 { 1e-15 * u } else { 1e-9 * direct };
        prop_assert!((t_step(u) - direct).abs() <= tol);
    }
}
