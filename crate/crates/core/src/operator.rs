//! The Dickson-Hipp operator `T_s f(t) = int_t^inf e^{-s(x-t)} f(x) dx` and
//! its dual `T~_s f(t) = int_0^t e^{-s(t-x)} f(x) dx`.

use serde::Serialize;

use crate::distributions::{integrate_support, Distribution};
use crate::entropy;
use crate::error::{Error, Result};
use crate::numerics::{self, InnerStatus, QuadratureResult, Tolerance};
use crate::sequence::IteratedSequence;

/// `T_s f(t)` for an `f` that vanishes beyond `upper` (pass infinity when it
/// does not). Fails with [`Error::Divergence`] when the improper integral
/// does not settle.
pub fn dickson_hipp<F: Fn(f64) -> f64>(f: F, s: f64, t: f64, upper: f64) -> Result<QuadratureResult> {
    let g = |x: f64| {
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            (-s * (x - t)).exp() * v
        }
    };
    let tol = Tolerance::default();
    let r = if upper.is_finite() {
        numerics::integrate(g, t, upper.max(t), &tol)
    } else {
        numerics::integrate_to_infinity(g, t, 1.0, &tol)
    };
    if !(r.converged && r.value.is_finite()) {
        return Err(Error::Divergence(format!(
            "Dickson-Hipp operator at s = {s}, t = {t}"
        )));
    }
    Ok(r)
}

/// `T~_s f(t)`; any real `s` is allowed.
pub fn dual_operator<F: Fn(f64) -> f64>(f: F, s: f64, t: f64) -> QuadratureResult {
    dual_with(f, s, t, &Tolerance::default())
}

fn dual_with<F: Fn(f64) -> f64>(f: F, s: f64, t: f64, tol: &Tolerance) -> QuadratureResult {
    if t <= 0.0 {
        return QuadratureResult::exact(0.0);
    }
    numerics::integrate(
        |x| {
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                (-s * (t - x)).exp() * v
            }
        },
        0.0,
        t,
        tol,
    )
}

/// `int_0^inf e^{-sx} f(x) dx`, with `f` vanishing beyond `upper`.
pub fn laplace_transform<F: Fn(f64) -> f64>(f: F, s: f64, upper: f64) -> Result<QuadratureResult> {
    dickson_hipp(f, s, 0.0, upper)
}

/// The two sides of an identity and their distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub converged: bool,
}

impl Gap {
    fn new(lhs: QuadratureResult, rhs: QuadratureResult) -> Self {
        Self {
            lhs: lhs.value,
            rhs: rhs.value,
            gap: (lhs.value - rhs.value).abs(),
            converged: lhs.converged && rhs.converged,
        }
    }
}

/// `T~_{-s} f(t) + T_s f(t)` against `e^{st} L_s[f]`.
pub fn operator_identity_check<F: Fn(f64) -> f64>(f: F, s: f64, t: f64, upper: f64) -> Result<Gap> {
    // Past `upper` the dual only picks up the exponential factor; stopping
    // there keeps a jump in `f` at an endpoint.
    let stop = t.min(upper);
    let dual = dual_operator(&f, -s, stop).scale((s * (t - stop)).exp());
    let forward = dickson_hipp(&f, s, t, upper)?;
    let laplace = laplace_transform(&f, s, upper)?;
    Ok(Gap::new(dual.plus(forward), laplace.scale((s * t).exp())))
}

/// `T~_s f(t)` against `F(t) - s T~_s F(t)` (integration by parts).
pub fn by_parts_check<D: Distribution + ?Sized>(d: &D, s: f64, t: f64) -> Gap {
    let lhs = dual_operator(|x| d.pdf(x), s, t);
    let rhs = dual_operator(|x| d.cdf(x), s, t).scale(-s).shift(d.cdf(t));
    Gap::new(lhs, rhs)
}

/// `s T~_s f(t)` against the convolution of `f` with an exponential(`s`)
/// density, computed with the integration variable reflected.
pub fn convolution_check<D: Distribution + ?Sized>(d: &D, s: f64, t: f64) -> Result<Gap> {
    if !(s > 0.0) {
        return Err(Error::ParameterDomain {
            name: "s",
            value: s,
            reason: "an exponential density needs a positive rate",
        });
    }
    let lhs = dual_operator(|x| d.pdf(x), s, t).scale(s);
    let rhs = numerics::integrate(
        |y| s * (-s * y).exp() * d.pdf(t - y),
        0.0,
        t,
        &Tolerance::default(),
    );
    Ok(Gap::new(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfCheck {
    pub t_star: f64,
    /// `e^{s t*} T~_s f(t*)`.
    pub limit_value: f64,
    pub mgf: f64,
    pub gap: f64,
    pub converged: bool,
}

/// Compares `e^{st} T~_s f(t)` at a far point `t*` with `E[e^{sX}]`.
///
/// `t*` is the upper endpoint for bounded supports. Otherwise it starts at
/// the `1 - 1e-10` quantile and moves out until the neglected part of the
/// moment generating function, `int_{t*}^inf e^{sx} f`, is below `1e-10`.
pub fn mgf_limit_check<D: Distribution + ?Sized>(d: &D, s: f64) -> Result<MgfCheck> {
    if let Some(r) = d.mgf_radius() {
        if s >= r {
            return Err(Error::Divergence(format!(
                "moment generating function of {} at s = {s}",
                d.name()
            )));
        }
    }
    let tol = Tolerance::default();
    let weighted = |x: f64| {
        let lp = d.log_pdf(x);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            (s * x + lp).exp()
        }
    };
    let mgf = integrate_support(d, weighted, &tol);
    let support = d.support();
    let t_star = if support.is_bounded() {
        support.upper
    } else {
        let mut eps = 1e-10;
        loop {
            let t = d.inverse_survival(eps)?;
            let tail = numerics::integrate_to_infinity(weighted, t, 1.0, &tol);
            if tail.value.abs() < 1e-10 || eps < 1e-280 {
                break t;
            }
            eps *= 1e-2;
        }
    };
    // The dual value is of order e^{-s t*}, far below any absolute floor.
    let relative = Tolerance {
        absolute: f64::MIN_POSITIVE,
        relative: 1e-12,
        max_depth: tol.max_depth,
    };
    let dual = dual_with(|x| d.pdf(x), s, t_star, &relative);
    let limit = dual.scale((s * t_star).exp());
    Ok(MgfCheck {
        t_star,
        limit_value: limit.value,
        mgf: mgf.value,
        gap: (limit.value - mgf.value).abs(),
        converged: limit.converged && mgf.converged,
    })
}

/// `T~_s F_{n+1}(t)` against `[1 + T_n(t)] T~_s F_n(t) + T~_s q_n(t)`, where
/// `q_n(u) = tau_n(u) T~_s F_n(u)`. The inner operator runs at a tolerance
/// ten times tighter than the outer one.
pub fn operator_recursion_check(seq: &IteratedSequence, n: usize, s: f64, t: f64) -> Result<Gap> {
    let m = seq.member(n)?;
    let next = seq.member(n + 1)?;
    let outer = Tolerance::default();
    let inner = outer.scaled(0.1);
    let lhs = dual_with(|x| next.cdf(x), s, t, &outer);
    let head = dual_with(|x| m.cdf(x), s, t, &outer).scale(1.0 + m.t(t));
    let status = InnerStatus::new();
    let nested = dual_with(
        |u| match m.reversed_hazard(u) {
            Ok(tau) if tau > 0.0 => tau * status.take(Ok(dual_with(|x| m.cdf(x), s, u, &inner))),
            _ => 0.0,
        },
        s,
        t,
        &outer,
    );
    let rhs = status.finish(head.plus(nested));
    Ok(Gap::new(lhs, rhs))
}

/// The `s = 0` case: `T~_0 F_{n+1}(t)` against
/// `F_n(t) [mit_n(t)(1 + T_n(t)) + CE(X_n; t)]`.
pub fn s0_corollary_check(seq: &IteratedSequence, n: usize, t: f64) -> Result<Gap> {
    let m = seq.member(n)?;
    let next = seq.member(n + 1)?;
    let lhs = dual_operator(|x| next.cdf(x), 0.0, t);
    let mit = m.mean_inactivity_time(t)?;
    let ce = entropy::dynamic_cumulative_entropy(&m, t)?.value;
    let rhs = mit.scale(1.0 + m.t(t)).plus(ce).scale(m.cdf(t));
    Ok(Gap::new(lhs, rhs))
}
