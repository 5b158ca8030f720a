//! The chain `X_1, X_2, ...` obtained by repeatedly applying the reversed
//! relevation transform of a distribution with itself.
//!
//! Everything is driven by the scalar map `T -> T - ln(1 + T)` applied to the
//! cumulative reversed hazard `T_1(x) = -ln F(x)` of the base distribution:
//! `F_n = exp(-T_n)`, `f_n = f * T_1 * ... * T_{n-1}`.

use std::fmt;
use std::sync::Arc;

use crate::distributions::{integrate_over, integrate_support, quantile_grid, Distribution, Support};
use crate::entropy;
use crate::error::{Error, Result};
use crate::numerics::{InnerStatus, QuadratureResult, Tolerance};

/// One step of the recursion, `u - ln(1 + u)`.
///
/// A power series is used for small `u`, where the direct difference loses
/// most of its digits. Infinity maps to infinity.
pub fn t_step(u: f64) -> f64 {
    if u.is_infinite() || u.is_nan() {
        return u;
    }
    if u <= 0.0 {
        return 0.0;
    }
    if u < 0.5 {
        // sum_{k>=2} (-1)^k u^k / k
        let mut power = u * u;
        let mut sum = 0.0;
        let mut k = 2.0;
        let mut sign = 1.0;
        loop {
            let term = power / k;
            sum += sign * term;
            if term <= 1e-18 * sum.abs() {
                break;
            }
            power *= u;
            k += 1.0;
            sign = -sign;
        }
        sum
    } else {
        u - u.ln_1p()
    }
}

/// `T_n` from `T_1`: the step applied `n - 1` times.
pub fn t_iterate(t1: f64, n: usize) -> f64 {
    let mut t = t1;
    for _ in 1..n {
        t = t_step(t);
    }
    t
}

/// `[T_1, ..., T_n]` at a single point.
pub fn t_values(t1: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut t = t1;
    for i in 0..n {
        if i > 0 {
            t = t_step(t);
        }
        out.push(t);
    }
    out
}

pub const DEFAULT_MAX_DEPTH: usize = 12;
const GRID_POINTS: usize = 256;

/// The sequence generated by a base distribution.
#[derive(Debug, Clone)]
pub struct IteratedSequence {
    base: Arc<dyn Distribution>,
    max_depth: usize,
    grid: Vec<f64>,
}

impl IteratedSequence {
    pub fn new(base: Arc<dyn Distribution>) -> Result<Self> {
        Self::with_max_depth(base, DEFAULT_MAX_DEPTH)
    }

    pub fn with_max_depth(base: Arc<dyn Distribution>, max_depth: usize) -> Result<Self> {
        if max_depth == 0 {
            return Err(Error::ParameterDomain {
                name: "max_depth",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        let grid = quantile_grid(base.as_ref(), GRID_POINTS, 1e-4, 1.0 - 1e-4)?;
        Ok(Self {
            base,
            max_depth,
            grid,
        })
    }

    pub fn base(&self) -> &Arc<dyn Distribution> {
        &self.base
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Base quantiles at probabilities evenly spaced over `[1e-4, 1 - 1e-4]`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_depth {
            return Err(Error::ParameterDomain {
                name: "n",
                value: n as f64,
                reason: "depth must lie in 1..=max_depth",
            });
        }
        Ok(())
    }

    /// The `n`-th member as a distribution in its own right.
    pub fn member(&self, n: usize) -> Result<SequenceMember> {
        self.check_depth(n)?;
        Ok(SequenceMember {
            base: Arc::clone(&self.base),
            n,
        })
    }

    pub fn t_n(&self, n: usize, x: f64) -> f64 {
        t_iterate(self.base.cumulative_reversed_hazard(x), n)
    }

    pub fn cdf_n(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.member(n)?.cdf(x))
    }

    pub fn pdf_n(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.member(n)?.pdf(x))
    }

    pub fn reversed_hazard_n(&self, n: usize, x: f64) -> Result<f64> {
        self.member(n)?.reversed_hazard(x)
    }

    /// `E(X_n)` by direct quadrature and by `E(X_1) - sum_{k<n} CE(X_k)`.
    pub fn mean_n(&self, n: usize) -> Result<TwoRoutes> {
        let direct = self.member(n)?.mean()?;
        let mut recursion = self.base.mean()?;
        for k in 1..n {
            recursion = recursion.minus(entropy::ce_sequence(self, k)?);
        }
        Ok(TwoRoutes { direct, recursion })
    }

    /// `mit_n(t)` by direct quadrature and by the recursion
    /// `mit_{k+1}(t) = mit_k(t) + CE(X_k; t) / (1 + T_k(t))`.
    pub fn mean_inactivity_n(&self, n: usize, t: f64) -> Result<TwoRoutes> {
        let direct = self.member(n)?.mean_inactivity_time(t)?;
        let mut recursion = self.base.mean_inactivity_time(t)?;
        for k in 1..n {
            let member = self.member(k)?;
            let ce_t = entropy::dynamic_cumulative_entropy(&member, t)?.value;
            recursion = recursion.plus(ce_t.scale(1.0 / (1.0 + self.t_n(k, t))));
        }
        Ok(TwoRoutes { direct, recursion })
    }

    /// `mit_n(t)` through the recursion only.
    pub fn mean_inactivity_recursive(&self, n: usize, t: f64) -> Result<QuadratureResult> {
        self.check_depth(n)?;
        let mut value = self.base.mean_inactivity_time(t)?;
        for k in 1..n {
            let member = self.member(k)?;
            let ce_t = entropy::dynamic_cumulative_entropy(&member, t)?.value;
            value = value.plus(ce_t.scale(1.0 / (1.0 + self.t_n(k, t))));
        }
        Ok(value)
    }

    /// `Cov(X_n, X_{n+1}) = Var(X_n) - Cov(X_n, mit_n(X_n))`.
    pub fn cov_consecutive(&self, n: usize) -> Result<QuadratureResult> {
        let m = self.member(n)?;
        let tol = Tolerance::default();
        let mean = m.mean()?;
        let second = m.second_moment()?;
        let var = second.minus(mean.times(mean));
        let status = InnerStatus::new();
        let mit_at = |x: f64| -> f64 {
            if n == 1 {
                status.take(m.mean_inactivity_time(x))
            } else {
                status.take(self.mean_inactivity_recursive(n, x))
            }
        };
        let e_mit = integrate_support(
            &m,
            |x| {
                let w = m.pdf(x);
                if w == 0.0 {
                    0.0
                } else {
                    w * mit_at(x)
                }
            },
            &tol,
        );
        let e_x_mit = integrate_support(
            &m,
            |x| {
                let w = m.pdf(x);
                if w == 0.0 {
                    0.0
                } else {
                    x * w * mit_at(x)
                }
            },
            &tol,
        );
        let cov_mit = e_x_mit.minus(mean.times(e_mit));
        Ok(status.finish(var.minus(cov_mit)))
    }
}

/// A quantity computed along two independent routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRoutes {
    pub direct: QuadratureResult,
    pub recursion: QuadratureResult,
}

impl TwoRoutes {
    pub fn gap(&self) -> f64 {
        (self.direct.value - self.recursion.value).abs()
    }
}

/// `X_n` for a fixed depth `n`.
#[derive(Debug, Clone)]
pub struct SequenceMember {
    base: Arc<dyn Distribution>,
    n: usize,
}

impl SequenceMember {
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &Arc<dyn Distribution> {
        &self.base
    }

    /// `T_n(x)`.
    pub fn t(&self, x: f64) -> f64 {
        t_iterate(self.base.cumulative_reversed_hazard(x), self.n)
    }
}

impl Distribution for SequenceMember {
    fn name(&self) -> String {
        format!("X{}[{}]", self.n, self.base.name())
    }

    fn support(&self) -> Support {
        self.base.support()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    fn log_cdf(&self, x: f64) -> f64 {
        if self.n == 1 {
            return self.base.log_cdf(x);
        }
        -self.t(x)
    }

    fn log_survival(&self, x: f64) -> f64 {
        if self.n == 1 {
            return self.base.log_survival(x);
        }
        let t = self.t(x);
        if t == 0.0 {
            f64::NEG_INFINITY
        } else {
            (-(-t).exp_m1()).ln()
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let lp = self.base.log_pdf(x);
        if self.n == 1 || lp == f64::NEG_INFINITY {
            return lp;
        }
        let ts = t_values(self.base.cumulative_reversed_hazard(x), self.n - 1);
        let mut sum = lp;
        for t in ts {
            if t == 0.0 {
                return f64::NEG_INFINITY;
            }
            if t.is_infinite() {
                // f * T^k -> 0 at the lower end for every built-in family.
                return f64::NEG_INFINITY;
            }
            sum += t.ln();
        }
        sum
    }

    fn score(&self, x: f64) -> Option<f64> {
        let base_score = self.base.score(x)?;
        if self.n == 1 {
            return Some(base_score);
        }
        let tau = self.base.reversed_hazard(x).ok()?;
        let ts = t_values(self.base.cumulative_reversed_hazard(x), self.n - 1);
        let mut derivative = -tau;
        let mut sum = base_score;
        for t in ts {
            if t == 0.0 || !t.is_finite() {
                return None;
            }
            sum += derivative / t;
            derivative *= t / (1.0 + t);
        }
        Some(sum)
    }

    fn scale_hint(&self) -> f64 {
        self.base.scale_hint()
    }

    // In the upper tail T_{k+1} ~ T_k^2 / 2 and 1 - F_n ~ T_n, so the tail of
    // X_n behaves like the base survival raised to 2^(n-1).
    fn tail_index(&self) -> Option<f64> {
        self.base
            .tail_index()
            .map(|index| index * 2f64.powi(self.n as i32 - 1))
    }

    fn mgf_radius(&self) -> Option<f64> {
        self.base
            .mgf_radius()
            .map(|r| r * 2f64.powi(self.n as i32 - 1))
    }

    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let mut tau = self.base.reversed_hazard(x)?;
        let ts = t_values(self.base.cumulative_reversed_hazard(x), self.n - 1);
        for t in ts {
            tau *= t / (1.0 + t);
        }
        Ok(tau)
    }
}

/// Density `w(x) f(x) / E[w(X)]`.
pub struct WeightedDensity {
    base: Arc<dyn Distribution>,
    weight: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    normalizer: f64,
}

impl fmt::Debug for WeightedDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedDensity")
            .field("base", &self.base.name())
            .field("normalizer", &self.normalizer)
            .finish()
    }
}

impl WeightedDensity {
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let f = self.base.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        (self.weight)(x) * f / self.normalizer
    }

    /// `int f^w` over `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> QuadratureResult {
        integrate_over(self.base.as_ref(), a, b, |x| self.pdf(x), &Tolerance::default())
    }
}

pub fn weighted_density<W>(base: Arc<dyn Distribution>, weight: W) -> Result<WeightedDensity>
where
    W: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let r = integrate_support(
        base.as_ref(),
        |x| {
            let f = base.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                weight(x) * f
            }
        },
        &Tolerance::default(),
    );
    if !(r.converged && r.value.is_finite() && r.value > 0.0) {
        return Err(Error::Divergence(format!(
            "normalizer of the weighted density of {} (value {})",
            base.name(),
            r.value
        )));
    }
    Ok(WeightedDensity {
        base,
        weight: Box::new(weight),
        normalizer: r.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_distribution, FamilySpec};
    use approx::assert_abs_diff_eq;

    fn seq(letter: char) -> IteratedSequence {
        let d = make_distribution(FamilySpec::reference(letter).unwrap()).unwrap();
        IteratedSequence::new(Arc::new(d)).unwrap()
    }

    #[test]
    fn t_step_matches_direct_formula() {
        for &u in &[0.3, 0.49, 0.5, 1.0, 7.0] {
            assert_abs_diff_eq!(t_step(u), u - u.ln_1p(), epsilon = 1e-15);
        }
        // Leading terms of the series.
        let u: f64 = 1e-6;
        assert_abs_diff_eq!(t_step(u) / (u * u / 2.0 - u * u * u / 3.0), 1.0, epsilon = 1e-12);
        assert_eq!(t_step(f64::INFINITY), f64::INFINITY);
        assert_eq!(t_step(0.0), 0.0);
    }

    #[test]
    fn t_iterate_examples() {
        assert_eq!(t_iterate(0.0, 7), 0.0);
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(t_iterate(ln2, 2), ln2 - ln2.ln_1p(), epsilon = 1e-15);
        assert_abs_diff_eq!(t_iterate(ln2, 2), 0.166558, epsilon = 1e-6);
        assert_eq!(t_iterate(2.5, 1), 2.5);
    }

    #[test]
    fn uniform_member_examples() {
        let s = seq('a');
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(s.cdf_n(2, 1.0).unwrap(), 0.5 * (1.0 + ln2), epsilon = 1e-14);
        assert_abs_diff_eq!(s.pdf_n(2, 1.0).unwrap(), 0.5 * ln2, epsilon = 1e-14);
        assert_abs_diff_eq!(
            s.reversed_hazard_n(2, 1.0).unwrap(),
            ln2 / (1.0 + ln2),
            epsilon = 1e-14
        );
        assert_eq!(s.cdf_n(1, 1.0).unwrap(), 0.5);
        for n in 1..=5 {
            assert_eq!(s.cdf_n(n, 2.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn depth_is_validated() {
        let s = seq('d');
        assert!(s.member(0).is_err());
        assert!(s.member(13).is_err());
        assert!(s.member(12).is_ok());
    }

    #[test]
    fn densities_normalize() {
        for letter in FamilySpec::reference_letters() {
            let s = seq(letter);
            for n in 1..=5 {
                let m = s.member(n).unwrap();
                let r = integrate_support(&m, |x| m.pdf(x), &Tolerance::default());
                assert!(r.converged, "{letter} n={n}");
                assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn score_matches_numeric_derivative() {
        for letter in FamilySpec::reference_letters() {
            let s = seq(letter);
            let m = s.member(3).unwrap();
            let x = s.base().quantile(0.4).unwrap();
            let analytic = m.score(x).unwrap();
            let numeric = crate::numerics::differentiate(|y| m.log_pdf(y), x, None);
            assert_abs_diff_eq!(analytic, numeric, epsilon = 1e-5 * (1.0 + analytic.abs()));
        }
    }

    #[test]
    fn means_match_table_values() {
        let s = seq('d');
        let m = s.mean_n(2).unwrap();
        assert_abs_diff_eq!(m.direct.value, 0.3550659, epsilon = 1e-6);
        assert!(m.gap() < 1e-6);
        let a = seq('a').mean_n(3).unwrap();
        assert_abs_diff_eq!(a.direct.value, 0.1806643, epsilon = 1e-6);
    }

    #[test]
    fn mean_inactivity_recursion_example() {
        let s = seq('a');
        let r = s.mean_inactivity_n(2, 1.0).unwrap();
        let expected = 0.5 + 0.25 / (1.0 + std::f64::consts::LN_2);
        assert_abs_diff_eq!(r.direct.value, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(r.recursion.value, expected, epsilon = 1e-9);
    }

    #[test]
    fn uniform_consecutive_covariance() {
        let c = seq('a').cov_consecutive(1).unwrap();
        assert!(c.converged);
        assert_abs_diff_eq!(c.value, 1.0 / 6.0, epsilon = 1e-8);
        let wide = make_distribution(FamilySpec::Uniform { b: 6.0 }).unwrap();
        let wide = IteratedSequence::new(Arc::new(wide)).unwrap();
        assert_abs_diff_eq!(wide.cov_consecutive(1).unwrap().value, 9.0 / 6.0, epsilon = 1e-7);
    }

    #[test]
    fn weighted_density_examples() {
        let u: Arc<dyn Distribution> = Arc::new(make_distribution(FamilySpec::Uniform { b: 2.0 }).unwrap());
        let w = weighted_density(Arc::clone(&u), |x| x).unwrap();
        assert_abs_diff_eq!(w.pdf(0.5), 0.25, epsilon = 1e-10);
        let one = weighted_density(Arc::clone(&u), |_| 1.0).unwrap();
        assert_abs_diff_eq!(one.pdf(0.3), 0.5, epsilon = 1e-12);

        let e: Arc<dyn Distribution> = Arc::new(make_distribution(FamilySpec::Exponential { lambda: 1.0 }).unwrap());
        let base = Arc::clone(&e);
        let wt = weighted_density(Arc::clone(&e), move |x| base.cumulative_reversed_hazard(x)).unwrap();
        assert_abs_diff_eq!(wt.normalizer(), 1.0, epsilon = 1e-9);
        let s = IteratedSequence::new(e).unwrap();
        for &x in &[0.1, 0.7, 2.0] {
            assert_abs_diff_eq!(wt.pdf(x), s.pdf_n(2, x).unwrap(), epsilon = 1e-9);
        }
        assert!(weighted_density(u, |_| 0.0).is_err());
    }
}
