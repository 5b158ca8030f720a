//! Relevation and reversed relevation transforms, proportional (reversed)
//! hazards models and the system mixtures built from them.
//!
//! For a pair `(G, F)`:
//!
//! * reversed relevation: `G(x) + F(x) int_x^inf g(t)/F(t) dt`, density
//!   `f(x) int_x^inf g/F`;
//! * relevation (survival): `1-G(x) + (1-F(x)) int_0^x g(t)/(1-F(t)) dt`,
//!   density `f(x) int_0^x g/(1-F)`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{integrate_over, Distribution, Support};
use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureResult, Tolerance};
use crate::orders::{OrderReport, Relation, Verdict, POINTWISE_TOLERANCE};

/// Degeneracy threshold for `theta = 1` and `theta = m`.
pub const DEGENERACY: f64 = 1e-9;

fn inner_tolerance() -> Tolerance {
    Tolerance {
        absolute: 1e-14,
        relative: 1e-12,
        max_depth: 60,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    ReversedRelevation,
    Relevation,
}

/// The result of a transform applied to a pair of distributions.
#[derive(Debug, Clone)]
pub struct TransformedDistribution {
    g: Arc<dyn Distribution>,
    f: Arc<dyn Distribution>,
    kind: TransformKind,
    support: Support,
}

/// `G #~ F`, the law of `X[Y]`.
pub fn reversed_relevation(g: Arc<dyn Distribution>, f: Arc<dyn Distribution>) -> TransformedDistribution {
    let (sg, sf) = (g.support(), f.support());
    let support = Support {
        lower: sg.lower.min(sf.lower),
        upper: sg.upper.min(sf.upper),
    };
    TransformedDistribution {
        g,
        f,
        kind: TransformKind::ReversedRelevation,
        support,
    }
}

/// `G # F`, the law of `X(Y)`.
pub fn relevation(g: Arc<dyn Distribution>, f: Arc<dyn Distribution>) -> TransformedDistribution {
    let (sg, sf) = (g.support(), f.support());
    let support = Support {
        lower: sg.lower.max(sf.lower),
        upper: sg.upper.max(sf.upper),
    };
    TransformedDistribution {
        g,
        f,
        kind: TransformKind::Relevation,
        support,
    }
}

/// Applies `kind` to `(g, f)`.
pub fn transform(kind: TransformKind, g: Arc<dyn Distribution>, f: Arc<dyn Distribution>) -> TransformedDistribution {
    match kind {
        TransformKind::ReversedRelevation => reversed_relevation(g, f),
        TransformKind::Relevation => relevation(g, f),
    }
}

impl TransformedDistribution {
    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// `ln F(x) + ln int_x^inf g/F` (reversed) or `ln(1-F(x)) + ln int_0^x
    /// g/(1-F)` (relevation), as an integral of `exp` of log terms.
    fn scaled_inner(&self, x: f64) -> QuadratureResult {
        let tol = inner_tolerance();
        let sg = self.g.support();
        match self.kind {
            TransformKind::ReversedRelevation => {
                let log_fx = self.f.log_cdf(x);
                if log_fx == f64::NEG_INFINITY {
                    return QuadratureResult::exact(0.0);
                }
                let a = x.max(sg.lower);
                if a >= sg.upper {
                    return QuadratureResult::exact(0.0);
                }
                integrate_over(
                    self.g.as_ref(),
                    a,
                    sg.upper,
                    |t| {
                        let lg = self.g.log_pdf(t);
                        if lg == f64::NEG_INFINITY {
                            0.0
                        } else {
                            (lg + log_fx - self.f.log_cdf(t)).exp()
                        }
                    },
                    &tol,
                )
            }
            TransformKind::Relevation => {
                let log_sx = self.f.log_survival(x);
                if log_sx == f64::NEG_INFINITY {
                    return QuadratureResult::exact(0.0);
                }
                let b = x.min(sg.upper);
                if b <= sg.lower {
                    return QuadratureResult::exact(0.0);
                }
                numerics::integrate(
                    |t| {
                        let lg = self.g.log_pdf(t);
                        if lg == f64::NEG_INFINITY {
                            0.0
                        } else {
                            (lg + log_sx - self.f.log_survival(t)).exp()
                        }
                    },
                    sg.lower,
                    b,
                    &tol,
                )
            }
        }
    }

    /// The cdf together with the quadrature status of its inner integral.
    pub fn cdf_checked(&self, x: f64) -> QuadratureResult {
        let inner = self.scaled_inner(x);
        match self.kind {
            TransformKind::ReversedRelevation => inner.shift(self.g.cdf(x)),
            TransformKind::Relevation => inner.shift(self.g.survival(x)).scale(-1.0).shift(1.0),
        }
    }

    /// The survival function together with its quadrature status.
    pub fn survival_checked(&self, x: f64) -> QuadratureResult {
        self.cdf_checked(x).scale(-1.0).shift(1.0)
    }

    fn log_integral(&self, x: f64) -> f64 {
        // Undo the F(x) (or 1-F(x)) scaling in log space.
        let log_scale = match self.kind {
            TransformKind::ReversedRelevation => self.f.log_cdf(x),
            TransformKind::Relevation => self.f.log_survival(x),
        };
        let v = self.scaled_inner(x).value;
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        v.ln() - log_scale
    }
}

impl Distribution for TransformedDistribution {
    fn name(&self) -> String {
        let op = match self.kind {
            TransformKind::ReversedRelevation => "#~",
            TransformKind::Relevation => "#",
        };
        format!("({} {} {})", self.g.name(), op, self.f.name())
    }

    fn support(&self) -> Support {
        self.support
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 0.0;
        }
        if x >= self.support.upper {
            return 1.0;
        }
        self.cdf_checked(x).value.clamp(0.0, 1.0)
    }

    fn log_survival(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 0.0;
        }
        if x >= self.support.upper {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            TransformKind::Relevation => {
                let s = self.g.survival(x) + self.scaled_inner(x).value;
                s.clamp(0.0, 1.0).ln()
            }
            TransformKind::ReversedRelevation => (-self.cdf(x)).ln_1p(),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return f64::NEG_INFINITY;
        }
        let lf = self.f.log_pdf(x);
        if lf == f64::NEG_INFINITY {
            return lf;
        }
        lf + self.log_integral(x)
    }

    fn scale_hint(&self) -> f64 {
        self.g.scale_hint().min(self.f.scale_hint())
    }

    fn tail_index(&self) -> Option<f64> {
        match (self.g.tail_index(), self.f.tail_index()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `G = F^theta`.
    ReversedHazards,
    /// `1 - G = (1 - F)^theta`.
    Hazards,
}

/// A distribution in a proportional (reversed) hazards family.
#[derive(Debug, Clone)]
pub struct ProportionalModel {
    baseline: Arc<dyn Distribution>,
    theta: f64,
    flavor: Flavor,
}

impl ProportionalModel {
    pub fn new(baseline: Arc<dyn Distribution>, theta: f64, flavor: Flavor) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "theta",
                value: theta,
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            baseline,
            theta,
            flavor,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn baseline(&self) -> &Arc<dyn Distribution> {
        &self.baseline
    }
}

impl Distribution for ProportionalModel {
    fn name(&self) -> String {
        let tag = match self.flavor {
            Flavor::ReversedHazards => "prhr",
            Flavor::Hazards => "phr",
        };
        format!("{tag}({}, theta={})", self.baseline.name(), self.theta)
    }

    fn support(&self) -> Support {
        self.baseline.support()
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.flavor {
            Flavor::ReversedHazards => self.log_cdf(x).exp(),
            Flavor::Hazards => -self.log_survival(x).exp_m1(),
        }
    }

    fn log_cdf(&self, x: f64) -> f64 {
        match self.flavor {
            Flavor::ReversedHazards => self.theta * self.baseline.log_cdf(x),
            Flavor::Hazards => (-self.log_survival(x).exp()).ln_1p(),
        }
    }

    fn log_survival(&self, x: f64) -> f64 {
        match self.flavor {
            Flavor::ReversedHazards => {
                let lc = self.log_cdf(x);
                if lc == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (-lc.exp_m1()).ln()
                }
            }
            Flavor::Hazards => self.theta * self.baseline.log_survival(x),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let lf = self.baseline.log_pdf(x);
        if lf == f64::NEG_INFINITY {
            return lf;
        }
        let l = match self.flavor {
            Flavor::ReversedHazards => self.baseline.log_cdf(x),
            Flavor::Hazards => self.baseline.log_survival(x),
        };
        let power = if self.theta == 1.0 { 0.0 } else { (self.theta - 1.0) * l };
        self.theta.ln() + power + lf
    }

    fn score(&self, x: f64) -> Option<f64> {
        let base = self.baseline.score(x)?;
        Some(match self.flavor {
            Flavor::ReversedHazards => base + (self.theta - 1.0) * self.baseline.reversed_hazard(x).ok()?,
            Flavor::Hazards => base - (self.theta - 1.0) * self.baseline.hazard(x),
        })
    }

    fn scale_hint(&self) -> f64 {
        self.baseline.scale_hint()
    }

    fn tail_index(&self) -> Option<f64> {
        let index = self.baseline.tail_index()?;
        Some(match self.flavor {
            Flavor::ReversedHazards => index,
            Flavor::Hazards => index * self.theta,
        })
    }

    fn mgf_radius(&self) -> Option<f64> {
        let r = self.baseline.mgf_radius()?;
        Some(match self.flavor {
            Flavor::ReversedHazards => r,
            Flavor::Hazards => r * self.theta,
        })
    }
}

/// `(theta e^{-u} - e^{-theta u}) / (theta - 1)`, with the limit
/// `e^{-u}(1 + u)` at `theta = 1`.
fn two_term_mixture(theta: f64, u: f64) -> f64 {
    if u.is_infinite() {
        return 0.0;
    }
    if (theta - 1.0).abs() < DEGENERACY {
        return (-u).exp() * (1.0 + u);
    }
    (theta * (-u).exp() - (-theta * u).exp()) / (theta - 1.0)
}

/// Closed form of `F^theta #~ F` (equivalently `F #~ F^theta`).
pub fn prhr_closed_form(model: &ProportionalModel, x: f64) -> Result<f64> {
    if model.flavor != Flavor::ReversedHazards {
        return Err(Error::ParameterDomain {
            name: "flavor",
            value: model.theta,
            reason: "the reversed closed form needs a proportional reversed hazards model",
        });
    }
    Ok(two_term_mixture(model.theta, model.baseline.cumulative_reversed_hazard(x)))
}

/// Closed form of the survival of `F^theta # F` (hazards flavor).
pub fn phr_closed_form(model: &ProportionalModel, x: f64) -> Result<f64> {
    if model.flavor != Flavor::Hazards {
        return Err(Error::ParameterDomain {
            name: "flavor",
            value: model.theta,
            reason: "the relevation closed form needs a proportional hazards model",
        });
    }
    Ok(two_term_mixture(model.theta, model.baseline.cumulative_hazard(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `X_{m:m}[Y]` with `Y ~ F^theta`; cdf `(theta F^m - m F^theta)/(theta - m)`.
    Parallel,
    /// `X_{1:m}(Y)` with `1 - Y ~ (1-F)^theta`; survival
    /// `(theta Fbar^m - m Fbar^theta)/(theta - m)`.
    Series,
}

/// Generalized mixture produced by a system of `m` i.i.d. components.
#[derive(Debug, Clone)]
pub struct SystemMixture {
    base: Arc<dyn Distribution>,
    m: u32,
    theta: f64,
    kind: SystemKind,
}

fn system(base: Arc<dyn Distribution>, m: u32, theta: f64, kind: SystemKind) -> Result<SystemMixture> {
    if m == 0 {
        return Err(Error::ParameterDomain {
            name: "m",
            value: 0.0,
            reason: "a system needs at least one component",
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::ParameterDomain {
            name: "theta",
            value: theta,
            reason: "must be positive and finite",
        });
    }
    if (theta - m as f64).abs() < DEGENERACY {
        return Err(Error::Unimplemented(format!(
            "limiting form of the system mixture at theta = m = {m}"
        )));
    }
    Ok(SystemMixture { base, m, theta, kind })
}

pub fn parallel_transform(base: Arc<dyn Distribution>, m: u32, theta: f64) -> Result<SystemMixture> {
    system(base, m, theta, SystemKind::Parallel)
}

pub fn series_transform(base: Arc<dyn Distribution>, m: u32, theta: f64) -> Result<SystemMixture> {
    system(base, m, theta, SystemKind::Series)
}

impl SystemMixture {
    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// `ln F` for the parallel system, `ln(1-F)` for the series system.
    fn log_base(&self, x: f64) -> f64 {
        match self.kind {
            SystemKind::Parallel => self.base.log_cdf(x),
            SystemKind::Series => self.base.log_survival(x),
        }
    }

    fn mixture(&self, x: f64) -> f64 {
        let l = self.log_base(x);
        if l == f64::NEG_INFINITY {
            return 0.0;
        }
        let m = self.m as f64;
        let th = self.theta;
        (th * (m * l).exp() - m * (th * l).exp()) / (th - m)
    }
}

impl Distribution for SystemMixture {
    fn name(&self) -> String {
        let tag = match self.kind {
            SystemKind::Parallel => "parallel",
            SystemKind::Series => "series",
        };
        format!("{tag}({}, m={}, theta={})", self.base.name(), self.m, self.theta)
    }

    fn support(&self) -> Support {
        self.base.support()
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            SystemKind::Parallel => self.mixture(x),
            SystemKind::Series => 1.0 - self.mixture(x),
        }
    }

    fn log_survival(&self, x: f64) -> f64 {
        match self.kind {
            SystemKind::Parallel => (-self.mixture(x)).ln_1p(),
            SystemKind::Series => self.mixture(x).ln(),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let lf = self.base.log_pdf(x);
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        let l = self.log_base(x);
        let m = self.m as f64;
        let th = self.theta;
        th * m * lf.exp() * (((m - 1.0) * l).exp() - ((th - 1.0) * l).exp()) / (th - m)
    }

    fn scale_hint(&self) -> f64 {
        self.base.scale_hint()
    }
}

/// Largest pointwise gap between `G op F` and `F op G` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutativityReport {
    pub max_abs_gap: f64,
    pub worst_point: f64,
    pub commutes: bool,
    /// Grid points where an inner quadrature did not converge.
    pub non_converged: Vec<f64>,
}

pub const COMMUTATIVITY_TOLERANCE: f64 = 1e-6;
pub const COMMUTATIVITY_GRID: usize = 64;

pub fn check_commutativity(
    f: Arc<dyn Distribution>,
    g: Arc<dyn Distribution>,
    kind: TransformKind,
    grid: &[f64],
    tol: f64,
) -> CommutativityReport {
    let gf = transform(kind, Arc::clone(&g), Arc::clone(&f));
    let fg = transform(kind, f, g);
    let rows: Vec<(f64, f64, bool)> = grid
        .par_iter()
        .map(|&x| {
            let a = gf.cdf_checked(x);
            let b = fg.cdf_checked(x);
            (x, (a.value - b.value).abs(), a.converged && b.converged)
        })
        .collect();
    let mut max_abs_gap = 0.0;
    let mut worst_point = grid.first().copied().unwrap_or(f64::NAN);
    let mut non_converged = Vec::new();
    for (x, gap, ok) in rows {
        if !ok {
            non_converged.push(x);
        }
        if gap > max_abs_gap {
            max_abs_gap = gap;
            worst_point = x;
        }
    }
    CommutativityReport {
        max_abs_gap,
        worst_point,
        commutes: max_abs_gap <= tol,
        non_converged,
    }
}

/// `X[Y] <=st min(X, Y)` and `X(Y) >=st max(X, Y)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StBounds {
    /// Reversed relevation cdf minus `F + G - FG`.
    pub lower: OrderReport,
    /// Relevation survival minus `1 - FG`.
    pub upper: OrderReport,
}

pub fn verify_st_bounds(f: Arc<dyn Distribution>, g: Arc<dyn Distribution>, grid: &[f64]) -> StBounds {
    let rev = reversed_relevation(Arc::clone(&g), Arc::clone(&f));
    let rel = relevation(Arc::clone(&g), Arc::clone(&f));
    let slacks: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&x| {
            let (fx, gx) = (f.cdf(x), g.cdf(x));
            let lower = rev.cdf_checked(x).value - (fx + gx - fx * gx);
            let upper = rel.survival_checked(x).value - (1.0 - fx * gx);
            (x, lower, upper)
        })
        .collect();
    let report = |pick: fn(&(f64, f64, f64)) -> f64| {
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for row in &slacks {
            if pick(row) < margin {
                margin = pick(row);
                witness = Some((row.0, row.0));
            }
        }
        if margin == f64::INFINITY {
            margin = 0.0;
        }
        let verdict = if margin < -POINTWISE_TOLERANCE.max(1e-10) {
            Verdict::Violated
        } else {
            Verdict::HoldsOnGrid
        };
        OrderReport {
            relation: Relation::St,
            verdict,
            witness: if verdict == Verdict::Violated { witness } else { None },
            margin,
            points: slacks.len(),
            skipped: 0,
        }
    };
    StBounds {
        lower: report(|r| r.1),
        upper: report(|r| r.2),
    }
}
