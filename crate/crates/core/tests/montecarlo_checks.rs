use std::sync::Arc;

use relevation::entropy::ce_sequence;
use relevation::montecarlo::{
    ks_one_sample, ks_two_sample, mc_covariance, mc_expectation, sample_consecutive_pairs,
    sample_sequence, SamplingMethod,
};
use relevation::{make_distribution, Distribution, FamilySpec, IteratedSequence};

fn sequence(l: char) -> IteratedSequence {
    IteratedSequence::new(Arc::new(make_distribution(FamilySpec::reference(l).unwrap()).unwrap())).unwrap()
}

#[test]
fn same_batch_on_any_thread_count() {
    let s = sequence('e');
    let draw = || sample_sequence(&s, 3, 20_000, 11, SamplingMethod::Inverse).unwrap().values;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(draw);
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(draw);
    assert_eq!(one, four);
}

#[test]
fn inverse_and_conditional_draws_match_x3() {
    for l in ['a', 'c', 'd'] {
        let s = sequence(l);
        let m = s.member(3).unwrap();
        let inv = sample_sequence(&s, 3, 20_000, 5, SamplingMethod::Inverse).unwrap();
        let cond = sample_sequence(&s, 3, 20_000, 6, SamplingMethod::Conditional).unwrap();
        assert!(ks_one_sample(&inv, &m).passes, "{l}");
        assert!(ks_one_sample(&cond, &m).passes, "{l}");
        assert!(ks_two_sample(&inv, &cond).passes, "{l}");
    }
}

#[test]
fn means_and_entropy_agree_with_quadrature() {
    for l in ['a', 'd', 'e'] {
        let s = sequence(l);
        let m = s.member(2).unwrap();
        let batch = sample_sequence(&s, 2, 40_000, 21, SamplingMethod::Inverse).unwrap();
        let mean = mc_expectation(&batch, |x| x);
        assert!(mean.z_score(m.mean().unwrap().value).abs() < 4.0, "{l} mean");
        // CE(X) = E[mit(X)] gives a sample route to the entropy.
        let mit = mc_expectation(&batch, |x| m.mean_inactivity_time(x).map(|r| r.value).unwrap_or(f64::NAN));
        let ce = ce_sequence(&s, 2).unwrap().value;
        assert!(mit.z_score(ce).abs() < 4.0, "{l} ce");
    }
}

#[test]
fn consecutive_covariance() {
    let s = sequence('d');
    let pairs = sample_consecutive_pairs(&s, 1, 40_000, 3).unwrap();
    assert!(pairs.iter().all(|p| p.1 <= p.0));
    let cov = mc_covariance(&pairs);
    assert!(cov.z_score(s.cov_consecutive(1).unwrap().value).abs() < 4.0);
}
