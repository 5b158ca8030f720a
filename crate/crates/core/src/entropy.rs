//! Differential, past, cumulative and dynamic cumulative entropies, and the
//! identities linking them to the sequence `X_n`.
//!
//! Terms of the form `F ln F` are evaluated as `-e^{-T} T` so that the
//! convention `0 ln 0 = 0` holds where `T` is infinite.

use crate::distributions::{integrate_over, integrate_support, Distribution};
use crate::error::{Error, Result};
use crate::numerics::{self, InnerStatus, QuadratureResult, Tolerance};
use crate::sequence::IteratedSequence;

fn check_interior<D: Distribution + ?Sized>(d: &D, t: f64, quantity: &'static str) -> Result<()> {
    let s = d.support();
    if !(t > s.lower) || d.log_cdf(t) == f64::NEG_INFINITY {
        return Err(Error::EvaluationDomain {
            quantity,
            x: t,
            reason: "point must lie above the lower endpoint with positive cdf",
        });
    }
    Ok(())
}

/// `F ln F` written as `-e^{-T} T`, zero when `T` is infinite.
fn f_log_f(t: f64) -> f64 {
    if t.is_infinite() || t == 0.0 {
        0.0
    } else {
        -(-t).exp() * t
    }
}

/// `-int f ln f`.
pub fn differential_entropy<D: Distribution + ?Sized>(d: &D) -> QuadratureResult {
    integrate_support(
        d,
        |x| {
            let lp = d.log_pdf(x);
            if lp == f64::NEG_INFINITY {
                0.0
            } else {
                -lp.exp() * lp
            }
        },
        &Tolerance::default(),
    )
}

/// Entropy of `[X | X <= t]`.
pub fn past_entropy<D: Distribution + ?Sized>(d: &D, t: f64) -> Result<QuadratureResult> {
    check_interior(d, t, "past entropy")?;
    let log_ft = d.log_cdf(t);
    let end = t.min(d.support().upper);
    Ok(numerics::integrate(
        |x| {
            let lp = d.log_pdf(x) - log_ft;
            if lp == f64::NEG_INFINITY {
                0.0
            } else {
                -lp.exp() * lp
            }
        },
        d.support().lower,
        end,
        &Tolerance::default(),
    ))
}

/// `CE(X) = -int F ln F = int F T`.
pub fn cumulative_entropy<D: Distribution + ?Sized>(d: &D) -> Result<QuadratureResult> {
    if let Some(index) = d.tail_index() {
        if index <= 1.0 {
            return Err(Error::Divergence(format!("cumulative entropy of {}", d.name())));
        }
    }
    Ok(integrate_support(
        d,
        |x| -f_log_f(d.cumulative_reversed_hazard(x)),
        &Tolerance::default(),
    ))
}

/// Dynamic cumulative entropy computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicCe {
    /// `-int_0^t (F(x)/F(t)) ln(F(x)/F(t)) dx`.
    pub value: QuadratureResult,
    /// `-(1/F(t)) int_0^t F ln F - T(t) mit(t)`.
    pub alternate: QuadratureResult,
}

impl DynamicCe {
    pub fn gap(&self) -> f64 {
        (self.value.value - self.alternate.value).abs()
    }
}

pub fn dynamic_cumulative_entropy<D: Distribution + ?Sized>(d: &D, t: f64) -> Result<DynamicCe> {
    check_interior(d, t, "dynamic cumulative entropy")?;
    let tol = Tolerance::default();
    let s = d.support();
    let end = t.min(s.upper);
    let tt = d.cumulative_reversed_hazard(t);
    let value = numerics::integrate(
        |x| {
            let diff = d.cumulative_reversed_hazard(x) - tt;
            if diff.is_infinite() {
                0.0
            } else {
                (-diff).exp() * diff
            }
        },
        s.lower,
        end,
        &tol,
    );
    let log_ft = -tt;
    let head = numerics::integrate(
        |x| -f_log_f(d.cumulative_reversed_hazard(x)) / log_ft.exp(),
        s.lower,
        end,
        &tol,
    );
    let mit = d.mean_inactivity_time(t)?;
    let alternate = head.minus(mit.scale(tt));
    Ok(DynamicCe { value, alternate })
}

/// `CE(X_n)`, integrating `F_n T_n` built from the recursion.
pub fn ce_sequence(seq: &IteratedSequence, n: usize) -> Result<QuadratureResult> {
    let m = seq.member(n)?;
    cumulative_entropy(&m)
}

/// `E[mit(X) | X <= t]`, the conditional form of `CE(X; t)`; with `t`
/// infinite it is `E[mit(X)]`.
pub fn expected_mean_inactivity<D: Distribution + ?Sized>(d: &D, t: f64) -> Result<QuadratureResult> {
    let s = d.support();
    let (end, log_ft) = if t.is_finite() {
        check_interior(d, t, "expected mean inactivity")?;
        (t.min(s.upper), d.log_cdf(t))
    } else {
        (s.upper, 0.0)
    };
    let status = InnerStatus::new();
    let r = integrate_over(
        d,
        s.lower,
        end,
        |x| {
            let w = (d.log_pdf(x) - log_ft).exp();
            if w == 0.0 || w.is_nan() {
                0.0
            } else {
                w * status.take(d.mean_inactivity_time(x))
            }
        },
        &Tolerance::default(),
    );
    Ok(status.finish(r))
}

/// Both sides of the two conditional identities at `t`:
/// `E[T_n/tau_n | X_n <= t] = CE(X_n; t) + mit_n(t) T_n(t)` and
/// `E[(X_n - E X_n)(T_n - 1) | X_n <= t] = T_n(t)(m_n(t) - E X_n) - CE(X_n; t)`,
/// with `m_n(t)` the mean past lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalIdentities {
    pub lhs1: QuadratureResult,
    pub rhs1: QuadratureResult,
    pub lhs2: QuadratureResult,
    pub rhs2: QuadratureResult,
}

impl ConditionalIdentities {
    pub fn gaps(&self) -> (f64, f64) {
        (
            (self.lhs1.value - self.rhs1.value).abs(),
            (self.lhs2.value - self.rhs2.value).abs(),
        )
    }
}

pub fn conditional_identities(seq: &IteratedSequence, n: usize, t: f64) -> Result<ConditionalIdentities> {
    let m = seq.member(n)?;
    check_interior(&m, t, "conditional identities")?;
    let tol = Tolerance::default();
    let s = m.support();
    let end = t.min(s.upper);
    let log_ft = m.log_cdf(t);
    let tn_t = m.t(t);
    let mean = m.mean()?;

    let lhs1 = numerics::integrate(
        |x| {
            let w = (m.log_pdf(x) - log_ft).exp();
            if w == 0.0 {
                return 0.0;
            }
            match m.reversed_hazard(x) {
                Ok(tau) if tau > 0.0 => m.t(x) / tau * w,
                _ => 0.0,
            }
        },
        s.lower,
        end,
        &tol,
    );
    let ce_t = dynamic_cumulative_entropy(&m, t)?.value;
    let mit = m.mean_inactivity_time(t)?;
    let rhs1 = ce_t.plus(mit.scale(tn_t));

    let lhs2 = numerics::integrate(
        |x| {
            let w = (m.log_pdf(x) - log_ft).exp();
            if w == 0.0 {
                0.0
            } else {
                (x - mean.value) * (m.t(x) - 1.0) * w
            }
        },
        s.lower,
        end,
        &tol,
    );
    let past_mean = m.mean_past_lifetime(t)?;
    let rhs2 = past_mean.minus(mean).scale(tn_t).minus(ce_t);
    Ok(ConditionalIdentities {
        lhs1,
        rhs1,
        lhs2,
        rhs2,
    })
}

/// Unconditional quantities whose values are fixed by theory:
/// `E[T_n(X_n)] = 1`, `Cov(X_n, T_n(X_n)) = -CE(X_n)`,
/// `E[T_n/tau_n] = CE(X_n)` and `E[mit_n(X_n)] = CE(X_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnconditionalIdentities {
    pub ce: QuadratureResult,
    pub expected_t: QuadratureResult,
    pub cov_x_t: QuadratureResult,
    pub expected_t_over_tau: QuadratureResult,
    pub expected_mit: QuadratureResult,
}

pub fn unconditional_identities(seq: &IteratedSequence, n: usize) -> Result<UnconditionalIdentities> {
    let m = seq.member(n)?;
    let tol = Tolerance::default();
    let ce = cumulative_entropy(&m)?;
    let weighted = |h: &dyn Fn(f64) -> f64| {
        integrate_support(
            &m,
            |x| {
                let w = m.pdf(x);
                if w == 0.0 {
                    0.0
                } else {
                    h(x) * w
                }
            },
            &tol,
        )
    };
    let expected_t = weighted(&|x| m.t(x));
    let expected_xt = weighted(&|x| x * m.t(x));
    let mean = m.mean()?;
    let cov_x_t = expected_xt.minus(mean.times(expected_t));
    let expected_t_over_tau = weighted(&|x| match m.reversed_hazard(x) {
        Ok(tau) if tau > 0.0 => m.t(x) / tau,
        _ => 0.0,
    });
    let expected_mit = expected_mean_inactivity(&m, f64::INFINITY)?;
    Ok(UnconditionalIdentities {
        ce,
        expected_t,
        cov_x_t,
        expected_t_over_tau,
        expected_mit,
    })
}

/// `E[T_n(X_n) | X_n <= t]`, which theory puts at `1 + T_n(t)`.
pub fn conditional_expected_t(seq: &IteratedSequence, n: usize, t: f64) -> Result<QuadratureResult> {
    let m = seq.member(n)?;
    check_interior(&m, t, "conditional expectation of T")?;
    let log_ft = m.log_cdf(t);
    let s = m.support();
    Ok(numerics::integrate(
        |x| {
            let w = (m.log_pdf(x) - log_ft).exp();
            if w == 0.0 {
                0.0
            } else {
                m.t(x) * w
            }
        },
        s.lower,
        t.min(s.upper),
        &Tolerance::default(),
    ))
}

/// Density of the intermediate variable `Z` of the probabilistic mean value
/// theorem applied to `X_{n+1} <=st X_n`.
#[derive(Debug, Clone)]
pub struct PmvtDensity {
    seq: IteratedSequence,
    n: usize,
    ce: f64,
}

impl PmvtDensity {
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn ce(&self) -> f64 {
        self.ce
    }

    /// `F_n(z) T_n(z) / CE(X_n)`.
    pub fn pdf(&self, z: f64) -> f64 {
        let t = self.seq.t_n(self.n, z);
        -f_log_f(t) / self.ce
    }

    /// `(F_{n+1}(z) - F_n(z)) / (E X_n - E X_{n+1})` with both means by
    /// quadrature.
    pub fn pdf_from_means(&self, z: f64, mean_n: f64, mean_next: f64) -> Result<f64> {
        let upper = self.seq.cdf_n(self.n + 1, z)?;
        let lower = self.seq.cdf_n(self.n, z)?;
        Ok((upper - lower) / (mean_n - mean_next))
    }

    pub fn total_mass(&self) -> QuadratureResult {
        integrate_support(self.seq.base().as_ref(), |z| self.pdf(z), &Tolerance::default())
    }
}

pub fn pmvt_density(seq: &IteratedSequence, n: usize) -> Result<PmvtDensity> {
    let ce = ce_sequence(seq, n)?.require("cumulative entropy")?;
    if !(ce > 0.0) {
        return Err(Error::EvaluationDomain {
            quantity: "mean value density",
            x: ce,
            reason: "cumulative entropy must be positive",
        });
    }
    Ok(PmvtDensity {
        seq: seq.clone(),
        n,
        ce,
    })
}

/// `CE(X_{n+1})` along the mean value theorem route
/// `E[mit_{n+1}(X_n)] - E[mit'_{n+1}(Z)] CE(X_n)` and along the rewritten
/// route `CE(X_n)(1 - E[mit'_{n+1}(Z)]) + E[CE(X_n; X_n) / (1 + T_n(X_n))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmvtStep {
    pub theorem_route: QuadratureResult,
    pub rewritten_route: QuadratureResult,
}

pub fn pmvt_ce_step(seq: &IteratedSequence, n: usize) -> Result<PmvtStep> {
    let mn = seq.member(n)?;
    let next = seq.member(n + 1)?;
    let z = pmvt_density(seq, n)?;
    let tol = Tolerance::default();
    let ce_n = ce_sequence(seq, n)?;

    let status = InnerStatus::new();
    let e_mit_next = integrate_support(
        &mn,
        |x| {
            let w = mn.pdf(x);
            if w == 0.0 {
                0.0
            } else {
                w * status.take(next.mean_inactivity_time(x))
            }
        },
        &tol,
    );
    // mit' = 1 - tau mit
    let e_mit_deriv = integrate_support(
        &mn,
        |x| {
            let w = z.pdf(x);
            if w == 0.0 {
                return 0.0;
            }
            match next.reversed_hazard(x) {
                Ok(tau) => w * (1.0 - tau * status.take(next.mean_inactivity_time(x))),
                Err(_) => 0.0,
            }
        },
        &tol,
    );
    let e_ce_ratio = integrate_support(
        &mn,
        |x| {
            let w = mn.pdf(x);
            if w == 0.0 {
                return 0.0;
            }
            let ce_x = dynamic_cumulative_entropy(&mn, x).map(|d| d.value);
            w * status.take(ce_x) / (1.0 + mn.t(x))
        },
        &tol,
    );
    let theorem_route = status.finish(e_mit_next.minus(e_mit_deriv.times(ce_n)));
    let rewritten_route = status.finish(
        ce_n.minus(ce_n.times(e_mit_deriv)).plus(e_ce_ratio),
    );
    Ok(PmvtStep {
        theorem_route,
        rewritten_route,
    })
}
