//! Seeded sampling of the base distribution and of the sequence, used as an
//! independent check on quadrature results.
//!
//! The generator is ChaCha8 (`rand_chacha`). Samples are produced in chunks
//! of [`CHUNK`] draws; chunk `i` uses the generator seeded with
//! `seed_from_u64(seed)` on stream `i`. Chunks can therefore be generated in
//! parallel and the output depends only on `(seed, n)`.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::sequence::IteratedSequence;

pub const GENERATOR: &str = "chacha8";
pub const CHUNK: usize = 4096;
/// Proposal pairs allowed per requested rejection sample.
pub const REJECTION_BUDGET: usize = 64;
/// One percent critical value of the Kolmogorov distribution.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    /// Sorted draws.
    pub values: Vec<f64>,
    pub seed: u64,
    pub generator: String,
    pub n: usize,
    /// Number of proposals used (equal to `n` for inverse sampling).
    pub proposals: usize,
}

impl SampleBatch {
    fn new(mut values: Vec<f64>, seed: u64, proposals: usize) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            n: values.len(),
            values,
            seed,
            generator: GENERATOR.to_string(),
            proposals,
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.n as f64 / self.proposals as f64
    }

    /// CSV with header `value`, one draw per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "value")?;
        for v in &self.values {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// `(estimate - reference) / standard_error`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.estimate - reference) / self.standard_error
    }

    fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
        Self {
            estimate: mean,
            standard_error: (var / n as f64).sqrt(),
            n,
        }
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform on the open interval (0, 1), on the grid `(k + 1/2) / 2^53`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Inverse transform; the upper half goes through the survival function so
/// that the far tail keeps its precision.
fn invert<D: Distribution + ?Sized>(d: &D, u: f64) -> Result<f64> {
    if u <= 0.5 {
        d.quantile(u)
    } else {
        d.inverse_survival(1.0 - u)
    }
}

fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK))
        .map(|i| (i, CHUNK.min(n - i * CHUNK)))
        .collect()
}

fn inverse_sample<D: Distribution + ?Sized>(d: &D, n: usize, seed: u64) -> Result<Vec<f64>> {
    let parts: Result<Vec<Vec<f64>>> = chunks(n)
        .into_par_iter()
        .map(|(i, len)| {
            let mut rng = chunk_rng(seed, i);
            (0..len).map(|_| invert(d, open_unit(&mut rng))).collect()
        })
        .collect();
    Ok(parts?.concat())
}

/// `n` draws from `d` by inverse transform.
pub fn sample_base<D: Distribution + ?Sized>(d: &D, n: usize, seed: u64) -> Result<SampleBatch> {
    Ok(SampleBatch::new(inverse_sample(d, n, seed)?, seed, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    /// Draw i.i.d. pairs from `X_{n-1}` and keep `x` when `x <= x'`.
    ///
    /// The kept values follow the law of `min(X_{n-1}, X'_{n-1})`, with cdf
    /// `1 - (1 - F_{n-1})^2`. That is the ordinary conditional law given the
    /// event `X <= X'`, not `F_n = F_{n-1}(1 + T_{n-1})`.
    Rejection,
    /// Invert `F_n`.
    Inverse,
    /// Draw `y` from `X_{n-1}`, then `x` from `[X_{n-1} | X_{n-1} <= y]`.
    Conditional,
}

/// `n_samples` draws from `X_depth`.
pub fn sample_sequence(
    seq: &IteratedSequence,
    depth: usize,
    n_samples: usize,
    seed: u64,
    method: SamplingMethod,
) -> Result<SampleBatch> {
    if depth < 2 {
        return Err(Error::ParameterDomain {
            name: "depth",
            value: depth as f64,
            reason: "sequence sampling starts at depth 2",
        });
    }
    match method {
        SamplingMethod::Inverse => {
            let m = seq.member(depth)?;
            sample_base(&m, n_samples, seed)
        }
        SamplingMethod::Conditional => {
            let pairs = sample_consecutive_pairs(seq, depth - 1, n_samples, seed)?;
            let values = pairs.into_iter().map(|p| p.1).collect();
            Ok(SampleBatch::new(values, seed, n_samples))
        }
        SamplingMethod::Rejection => {
            // Parents come from inverting F_{depth-1}.
            let parent = seq.member(depth - 1)?;
            let parts: Result<Vec<(Vec<f64>, usize)>> = chunks(n_samples)
                .into_par_iter()
                .map(|(i, len)| {
                    let mut rng = chunk_rng(seed, i);
                    let mut kept = Vec::with_capacity(len);
                    let mut proposals = 0;
                    while kept.len() < len {
                        if proposals >= REJECTION_BUDGET * len {
                            return Err(Error::Sampling(format!(
                                "rejection budget of {} pairs exhausted",
                                REJECTION_BUDGET * len
                            )));
                        }
                        let x = invert(&parent, open_unit(&mut rng))?;
                        let y = invert(&parent, open_unit(&mut rng))?;
                        proposals += 1;
                        if x <= y {
                            kept.push(x);
                        }
                    }
                    Ok((kept, proposals))
                })
                .collect();
            let parts = parts?;
            let proposals = parts.iter().map(|p| p.1).sum();
            let values = parts.into_iter().flat_map(|p| p.0).collect();
            Ok(SampleBatch::new(values, seed, proposals))
        }
    }
}

/// Pairs `(X_n, X_{n+1})`: `t` from `F_n`, then `y` from `F_n(.)/F_n(t)` on
/// `(0, t]`, solved as `T_n(y) = T_n(t) - ln u`.
pub fn sample_consecutive_pairs(
    seq: &IteratedSequence,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let m = seq.member(n)?;
    let parts: Result<Vec<Vec<(f64, f64)>>> = chunks(count)
        .into_par_iter()
        .map(|(i, len)| {
            let mut rng = chunk_rng(seed, i);
            (0..len)
                .map(|_| {
                    let t = invert(&m, open_unit(&mut rng))?;
                    let p = (m.log_cdf(t) + open_unit(&mut rng).ln()).exp();
                    let y = if p <= 0.0 { m.support().lower } else { m.quantile(p)?.min(t) };
                    Ok((t, y))
                })
                .collect()
        })
        .collect();
    Ok(parts?.concat())
}

/// Sample mean of `h` with its standard error.
pub fn mc_expectation<H>(batch: &SampleBatch, h: H) -> McEstimate
where
    H: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = batch.values.par_iter().map(|&x| h(x)).collect();
    McEstimate::from_values(&values)
}

/// Sample covariance with the standard error of the mean of centred
/// products.
pub fn mc_covariance(pairs: &[(f64, f64)]) -> McEstimate {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let products: Vec<f64> = pairs.iter().map(|&(x, y)| (x - mx) * (y - my)).collect();
    let mut e = McEstimate::from_values(&products);
    e.estimate *= n / (n - 1.0);
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub passes: bool,
}

/// One-sample Kolmogorov-Smirnov statistic against `d`.
pub fn ks_one_sample<D: Distribution + ?Sized>(batch: &SampleBatch, d: &D) -> KsResult {
    let n = batch.values.len() as f64;
    let statistic = batch
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = d.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .reduce(|| 0.0, f64::max);
    let critical_value = KS_CRITICAL_1PCT / n.sqrt();
    KsResult {
        statistic,
        critical_value,
        passes: statistic < critical_value,
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch) -> KsResult {
    let (x, y) = (&a.values, &b.values);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical_value = KS_CRITICAL_1PCT * ((n + m) / (n * m)).sqrt();
    KsResult {
        statistic,
        critical_value,
        passes: statistic < critical_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_distribution, FamilySpec};
    use std::sync::Arc;

    fn fam(spec: FamilySpec) -> crate::distributions::Family {
        make_distribution(spec).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let e = fam(FamilySpec::Exponential { lambda: 1.0 });
        let a = sample_base(&e, 10_000, 7).unwrap();
        let b = sample_base(&e, 10_000, 7).unwrap();
        let c = sample_base(&e, 10_000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
        assert_eq!(a.n, 10_000);
    }

    #[test]
    fn exponential_mean_and_uniform_ks() {
        let e = fam(FamilySpec::Exponential { lambda: 1.0 });
        let batch = sample_base(&e, 100_000, 1).unwrap();
        let m = mc_expectation(&batch, |x| x);
        assert!(m.z_score(1.0).abs() < 3.0, "{m:?}");
        let t = mc_expectation(&batch, |x| e.cumulative_reversed_hazard(x));
        assert!(t.z_score(1.0).abs() < 3.0, "{t:?}");

        let u = fam(FamilySpec::Uniform { b: 2.0 });
        let batch = sample_base(&u, 100_000, 2).unwrap();
        assert!(ks_one_sample(&batch, &u).passes);
        assert!(batch.values.iter().all(|&x| x > 0.0 && x < 2.0));
    }

    #[test]
    fn ks_detects_wrong_law() {
        let e = fam(FamilySpec::Exponential { lambda: 1.0 });
        let w = fam(FamilySpec::Weibull { k: 2.0 });
        let batch = sample_base(&e, 20_000, 3).unwrap();
        assert!(!ks_one_sample(&batch, &w).passes);
        let other = sample_base(&w, 20_000, 4).unwrap();
        assert!(!ks_two_sample(&batch, &other).passes);
    }

    #[test]
    fn rejection_acceptance_is_one_half() {
        let s = IteratedSequence::new(Arc::new(fam(FamilySpec::Exponential { lambda: 1.0 }))).unwrap();
        let n = 20_000;
        let r = sample_sequence(&s, 2, n, 5, SamplingMethod::Rejection).unwrap();
        let rate = r.acceptance_rate();
        assert!((rate - 0.5).abs() < 3.0 * (0.25 / r.proposals as f64).sqrt(), "{rate}");
        assert!(sample_sequence(&s, 1, n, 5, SamplingMethod::Inverse).is_err());
    }

    #[test]
    fn rejection_yields_the_minimum_and_conditional_yields_f2() {
        let e = Arc::new(fam(FamilySpec::Exponential { lambda: 1.0 }));
        let s = IteratedSequence::new(e).unwrap();
        let n = 50_000;
        let min_law = crate::transforms::ProportionalModel::new(
            Arc::clone(s.base()),
            2.0,
            crate::transforms::Flavor::Hazards,
        )
        .unwrap();
        let r = sample_sequence(&s, 2, n, 11, SamplingMethod::Rejection).unwrap();
        assert!(ks_one_sample(&r, &min_law).passes);
        let x2 = s.member(2).unwrap();
        assert!(!ks_one_sample(&r, &x2).passes);
        let c = sample_sequence(&s, 2, n, 12, SamplingMethod::Conditional).unwrap();
        assert!(ks_one_sample(&c, &x2).passes);
        let i = sample_sequence(&s, 2, n, 13, SamplingMethod::Inverse).unwrap();
        assert!(ks_two_sample(&c, &i).passes);
    }

    #[test]
    fn csv_export() {
        let u = fam(FamilySpec::Uniform { b: 2.0 });
        let batch = sample_base(&u, 3, 9).unwrap();
        let mut out = Vec::new();
        batch.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("value\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
