//! Lifetime distributions and the reliability functions built on them.
//!
//! Every distribution exposes its cdf and pdf together with log-space
//! versions. The cumulative reversed hazard `T(x) = -ln F(x)` is read from
//! `log_cdf`, so families override it with closed forms that stay accurate
//! where `F` underflows; the iterated sequence relies on large `T` values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureResult, Tolerance};

/// Open support interval `(lower, upper)`; `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && lower.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "lower",
                value: lower,
                reason: "support must start at a finite nonnegative point",
            });
        }
        if !(upper > lower) {
            return Err(Error::ParameterDomain {
                name: "upper",
                value: upper,
                reason: "support must be a nonempty interval",
            });
        }
        Ok(Self { lower, upper })
    }

    pub fn positive_half_line() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

/// A nonnegative absolutely continuous law.
///
/// Implementors provide `cdf`, `pdf` and `support`; the log-space methods
/// default to logarithms of those and should be overridden whenever a more
/// accurate closed form exists. All methods are pure, so distributions can
/// be shared across threads.
pub trait Distribution: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn support(&self) -> Support;

    fn cdf(&self, x: f64) -> f64;

    fn pdf(&self, x: f64) -> f64;

    fn log_cdf(&self, x: f64) -> f64 {
        self.cdf(x).ln()
    }

    fn log_survival(&self, x: f64) -> f64 {
        (-self.cdf(x)).ln_1p()
    }

    fn log_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    /// `d/dx ln f(x)` when available in closed form.
    fn score(&self, _x: f64) -> Option<f64> {
        None
    }

    /// A typical magnitude of the variable, used to scale integration maps.
    fn scale_hint(&self) -> f64 {
        let s = self.support();
        if s.is_bounded() {
            0.5 * (s.lower + s.upper)
        } else {
            s.lower + 1.0
        }
    }

    /// Polynomial tail index: moments of order `< index` are finite.
    /// `None` means the tail is lighter than any power.
    fn tail_index(&self) -> Option<f64> {
        None
    }

    /// Largest `s` such that `E[exp(sX)]` is finite for all smaller `s`.
    /// `None` when unknown.
    fn mgf_radius(&self) -> Option<f64> {
        None
    }

    /// Smallest `x` with `F(x) = p`, by bisection in log space after
    /// exponential bracket expansion.
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ParameterDomain {
                name: "p",
                value: p,
                reason: "probability must lie in (0, 1)",
            });
        }
        if p <= 0.5 {
            let target = p.ln();
            solve_increasing(self.support(), |x| self.log_cdf(x) - target)
        } else {
            let target = (-p).ln_1p();
            solve_increasing(self.support(), |x| target - self.log_survival(x))
        }
    }

    /// Point `x` with survival `1 - F(x) = q`, solved directly on
    /// `log_survival` so that tiny `q` keep full precision.
    fn inverse_survival(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::ParameterDomain {
                name: "q",
                value: q,
                reason: "probability must lie in (0, 1)",
            });
        }
        if q >= 0.5 {
            return self.quantile(1.0 - q);
        }
        let target = q.ln();
        solve_increasing(self.support(), |x| target - self.log_survival(x))
    }

    fn survival(&self, x: f64) -> f64 {
        self.log_survival(x).exp().clamp(0.0, 1.0)
    }

    /// `tau(x) = f(x) / F(x)`.
    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let s = self.support();
        if !(x > s.lower) {
            return Err(Error::EvaluationDomain {
                quantity: "reversed hazard",
                x,
                reason: "point is not above the lower support endpoint",
            });
        }
        let log_f = self.log_cdf(x);
        if log_f == f64::NEG_INFINITY {
            return Err(Error::EvaluationDomain {
                quantity: "reversed hazard",
                x,
                reason: "cdf underflows",
            });
        }
        Ok((self.log_pdf(x) - log_f).exp())
    }

    /// `T(x) = -ln F(x)`; `+inf` where the cdf is zero.
    fn cumulative_reversed_hazard(&self, x: f64) -> f64 {
        let t = -self.log_cdf(x);
        if t.is_nan() {
            f64::INFINITY
        } else {
            t.max(0.0)
        }
    }

    /// `h(x) = f(x) / (1 - F(x))`; `+inf` where the survival underflows.
    fn hazard(&self, x: f64) -> f64 {
        let log_s = self.log_survival(x);
        if log_s == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        (self.log_pdf(x) - log_s).exp()
    }

    /// `Lambda(x) = -ln(1 - F(x))`; `+inf` where the survival underflows.
    fn cumulative_hazard(&self, x: f64) -> f64 {
        (-self.log_survival(x)).max(0.0)
    }

    /// Mean inactivity time `E[t - X | X <= t] = (1/F(t)) int_0^t F`.
    fn mean_inactivity_time(&self, t: f64) -> Result<QuadratureResult> {
        mean_inactivity_with(self, t, &Tolerance::default())
    }

    /// `d/dt` of the mean inactivity time, `1 - tau(t) mit(t)`.
    fn mean_inactivity_derivative(&self, t: f64) -> Result<QuadratureResult> {
        let tau = self.reversed_hazard(t)?;
        let mit = self.mean_inactivity_time(t)?;
        Ok(mit.scale(-tau).shift(1.0))
    }

    /// Mean past lifetime `E[X | X <= t] = t - mit(t)`.
    fn mean_past_lifetime(&self, t: f64) -> Result<QuadratureResult> {
        Ok(self.mean_inactivity_time(t)?.scale(-1.0).shift(t))
    }

    /// `E X = lower + int_lower^upper (1 - F)`.
    fn mean(&self) -> Result<QuadratureResult> {
        if let Some(index) = self.tail_index() {
            if index <= 1.0 {
                return Err(Error::Divergence(format!("mean of {}", self.name())));
            }
        }
        let s = self.support();
        let surv = integrate_over(self, s.lower, s.upper, |x| self.survival(x), &Tolerance::default());
        Ok(surv.shift(s.lower))
    }

    /// `E X^2 = lower^2 + int_lower^upper 2x (1 - F)`.
    fn second_moment(&self) -> Result<QuadratureResult> {
        if let Some(index) = self.tail_index() {
            if index <= 2.0 {
                return Err(Error::Divergence(format!(
                    "second moment of {}",
                    self.name()
                )));
            }
        }
        let s = self.support();
        let r = integrate_over(
            self,
            s.lower,
            s.upper,
            |x| 2.0 * x * self.survival(x),
            &Tolerance::default(),
        );
        Ok(r.shift(s.lower * s.lower))
    }
}

fn mean_inactivity_with<D: Distribution + ?Sized>(
    d: &D,
    t: f64,
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    let s = d.support();
    if !(t > s.lower) {
        return Err(Error::EvaluationDomain {
            quantity: "mean inactivity time",
            x: t,
            reason: "point is not above the lower support endpoint",
        });
    }
    let log_ft = d.log_cdf(t);
    if log_ft == f64::NEG_INFINITY {
        return Err(Error::EvaluationDomain {
            quantity: "mean inactivity time",
            x: t,
            reason: "cdf underflows",
        });
    }
    let end = t.min(s.upper);
    let r = numerics::integrate(|x| (d.log_cdf(x) - log_ft).exp(), s.lower, end, tol);
    // Past the upper endpoint F = 1, so the integrand is identically 1.
    Ok(r.shift((t - end).max(0.0)))
}

/// Integrates `f` over `[a, b]`, mapping to a finite range when `b` is
/// infinite with the distribution's scale hint.
pub fn integrate_over<D, F>(d: &D, a: f64, b: f64, f: F, tol: &Tolerance) -> QuadratureResult
where
    D: Distribution + ?Sized,
    F: Fn(f64) -> f64,
{
    if b.is_finite() {
        numerics::integrate(f, a, b, tol)
    } else {
        let scale = (d.scale_hint() - a).max(1e-3);
        numerics::integrate_to_infinity(f, a, scale, tol)
    }
}

/// Integrates `f` over the whole support of `d`.
pub fn integrate_support<D, F>(d: &D, f: F, tol: &Tolerance) -> QuadratureResult
where
    D: Distribution + ?Sized,
    F: Fn(f64) -> f64,
{
    let s = d.support();
    integrate_over(d, s.lower, s.upper, f, tol)
}

/// Root of an increasing function on a support, with exponential bracket
/// expansion towards an infinite upper end.
fn solve_increasing<G: Fn(f64) -> f64>(support: Support, g: G) -> Result<f64> {
    let lo = support.lower;
    let hi = if support.is_bounded() {
        support.upper
    } else {
        let mut step = 1.0;
        let mut hi = lo + step;
        while g(hi) < 0.0 {
            step *= 2.0;
            hi = lo + step;
            if !hi.is_finite() {
                return Err(Error::Bracket { lo, hi });
            }
        }
        hi
    };
    numerics::bisect(g, lo, hi, |mid| 4.0 * f64::EPSILON * mid.abs().max(1e-300))
}

/// Points `quantile(p)` for `p` evenly spaced over `[p_lo, p_hi]`.
pub fn quantile_grid<D: Distribution + ?Sized>(
    d: &D,
    n: usize,
    p_lo: f64,
    p_hi: f64,
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::ParameterDomain {
            name: "n",
            value: n as f64,
            reason: "a grid needs at least two points",
        });
    }
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let p = p_lo + (p_hi - p_lo) * i as f64 / (n - 1) as f64;
        grid.push(d.quantile(p)?);
    }
    grid.dedup();
    Ok(grid)
}

/// `ln(e^x - 1)` for `x > 0` without overflow.
pub(crate) fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Parameterised built-in families.
///
/// Serialises as a flat record with a `family` tag, for example
/// `{"family":"frechet","a":1.0,"gamma":2.0}`; the textual form accepted by
/// [`FromStr`] is `frechet:a=1,gamma=2`, or a single letter `a`..`f` for the
/// six reference starting distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// `F(x) = x / b` on `(0, b)`.
    Uniform { b: f64 },
    /// `F(x) = exp(-a x^-gamma)`.
    Frechet { a: f64, gamma: f64 },
    /// `F(x) = exp(-c / (e^x - 1))`.
    GompertzLike { c: f64 },
    /// `F(x) = x^alpha` on `(0, 1)`.
    Power { alpha: f64 },
    /// `F(x) = 1 - exp(-lambda x)`.
    Exponential { lambda: f64 },
    /// `F(x) = 1 - exp(-x^k)`.
    Weibull { k: f64 },
    /// Gamma law with integer shape.
    Erlang { shape: u32, scale: f64 },
}

impl FamilySpec {
    /// The six reference starting distributions, keyed `a`..`f`.
    pub fn reference(letter: char) -> Option<Self> {
        Some(match letter.to_ascii_lowercase() {
            'a' => FamilySpec::Uniform { b: 2.0 },
            'b' => FamilySpec::Frechet { a: 1.0, gamma: 2.0 },
            'c' => FamilySpec::GompertzLike { c: 3.0 },
            'd' => FamilySpec::Exponential { lambda: 1.0 },
            'e' => FamilySpec::Weibull { k: 2.0 },
            'f' => FamilySpec::Erlang {
                shape: 3,
                scale: 2.0,
            },
            _ => return None,
        })
    }

    pub fn reference_letters() -> [char; 6] {
        ['a', 'b', 'c', 'd', 'e', 'f']
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::Uniform { .. } => "uniform",
            FamilySpec::Frechet { .. } => "frechet",
            FamilySpec::GompertzLike { .. } => "gompertz-like",
            FamilySpec::Power { .. } => "power",
            FamilySpec::Exponential { .. } => "exponential",
            FamilySpec::Weibull { .. } => "weibull",
            FamilySpec::Erlang { .. } => "erlang",
        }
    }

    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FamilySpec::Uniform { b } => vec![("b", b)],
            FamilySpec::Frechet { a, gamma } => vec![("a", a), ("gamma", gamma)],
            FamilySpec::GompertzLike { c } => vec![("c", c)],
            FamilySpec::Power { alpha } => vec![("alpha", alpha)],
            FamilySpec::Exponential { lambda } => vec![("lambda", lambda)],
            FamilySpec::Weibull { k } => vec![("k", k)],
            FamilySpec::Erlang { shape, scale } => vec![("shape", shape as f64), ("scale", scale)],
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in self.parameters() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::ParameterDomain {
                    name,
                    value,
                    reason: "parameters must be strictly positive and finite",
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.tag())?;
        for (i, (name, value)) in self.parameters().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s.len() == 1 {
            let c = s.chars().next().unwrap();
            return FamilySpec::reference(c).ok_or_else(|| parse_err("unknown reference family"));
        }
        let (tag, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| parse_err("parameters must be key=value"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| parse_err("parameter value is not a number"))?;
            params.insert(k.trim().to_string(), v);
        }
        let get = |name: &str| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| parse_err(&format!("missing parameter `{name}`")))
        };
        let spec = match tag.trim().to_ascii_lowercase().as_str() {
            "uniform" => FamilySpec::Uniform { b: get("b")? },
            "frechet" => FamilySpec::Frechet {
                a: get("a")?,
                gamma: get("gamma")?,
            },
            "gompertz-like" | "gompertz" => FamilySpec::GompertzLike { c: get("c")? },
            "power" => FamilySpec::Power {
                alpha: get("alpha")?,
            },
            "exponential" => FamilySpec::Exponential {
                lambda: get("lambda")?,
            },
            "weibull" => FamilySpec::Weibull { k: get("k")? },
            "erlang" => {
                let shape = get("shape")?;
                if shape.fract() != 0.0 || shape < 1.0 || shape > u32::MAX as f64 {
                    return Err(parse_err("erlang shape must be a positive integer"));
                }
                FamilySpec::Erlang {
                    shape: shape as u32,
                    scale: get("scale")?,
                }
            }
            _ => return Err(parse_err("unknown family")),
        };
        Ok(spec)
    }
}

/// A validated built-in family with closed-form cdf, pdf and score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    spec: FamilySpec,
}

/// Builds a distribution from its spec, checking parameter domains.
pub fn make_distribution(spec: FamilySpec) -> Result<Family> {
    spec.validate()?;
    Ok(Family { spec })
}

impl Family {
    pub fn spec(&self) -> FamilySpec {
        self.spec
    }

    /// `ln P(k, y)` for the regularised lower incomplete gamma, integer `k`.
    fn erlang_log_cdf(shape: u32, y: f64) -> f64 {
        let k = shape as f64;
        if y < k {
            let mut term = 1.0;
            let mut sum = 1.0;
            for j in 1..2000 {
                term *= y / (k + j as f64);
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            k * y.ln() - y - ln_factorial(shape) + sum.ln()
        } else {
            (-Self::erlang_log_survival(shape, y).exp()).ln_1p()
        }
    }

    /// `ln Q(k, y) = -y + ln sum_{j<k} y^j / j!`.
    fn erlang_log_survival(shape: u32, y: f64) -> f64 {
        if y < shape as f64 {
            return (-Self::erlang_log_cdf(shape, y).exp()).ln_1p();
        }
        // Sum in reverse, scaled by the largest term y^(k-1)/(k-1)!.
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in (1..shape).rev() {
            term *= j as f64 / y;
            sum += term;
        }
        let ln_top = (shape - 1) as f64 * y.ln() - ln_factorial(shape - 1);
        -y + ln_top + sum.ln()
    }
}

impl Distribution for Family {
    fn name(&self) -> String {
        self.spec.to_string()
    }

    fn support(&self) -> Support {
        match self.spec {
            FamilySpec::Uniform { b } => Support {
                lower: 0.0,
                upper: b,
            },
            FamilySpec::Power { .. } => Support {
                lower: 0.0,
                upper: 1.0,
            },
            _ => Support::positive_half_line(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lower {
            return 0.0;
        }
        if x >= s.upper {
            return 1.0;
        }
        match self.spec {
            FamilySpec::Uniform { b } => x / b,
            FamilySpec::Power { alpha } => x.powf(alpha),
            FamilySpec::Exponential { lambda } => -(-lambda * x).exp_m1(),
            FamilySpec::Weibull { k } => -(-x.powf(k)).exp_m1(),
            _ => self.log_cdf(x).exp(),
        }
    }

    fn log_cdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lower {
            return f64::NEG_INFINITY;
        }
        if x >= s.upper {
            return 0.0;
        }
        match self.spec {
            FamilySpec::Uniform { b } => (x / b).ln(),
            FamilySpec::Frechet { a, gamma } => -a * x.powf(-gamma),
            FamilySpec::GompertzLike { c } => -c / x.exp_m1(),
            FamilySpec::Power { alpha } => alpha * x.ln(),
            FamilySpec::Exponential { lambda } => (-(-lambda * x).exp_m1()).ln(),
            FamilySpec::Weibull { k } => (-(-x.powf(k)).exp_m1()).ln(),
            FamilySpec::Erlang { shape, scale } => Self::erlang_log_cdf(shape, x / scale),
        }
    }

    fn log_survival(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lower {
            return 0.0;
        }
        if x >= s.upper {
            return f64::NEG_INFINITY;
        }
        match self.spec {
            FamilySpec::Uniform { b } => (-x / b).ln_1p(),
            FamilySpec::Power { alpha } => (-x.powf(alpha)).ln_1p(),
            FamilySpec::Frechet { a, gamma } => (-(-a * x.powf(-gamma)).exp_m1()).ln(),
            FamilySpec::GompertzLike { c } => (-(-c / x.exp_m1()).exp_m1()).ln(),
            FamilySpec::Exponential { lambda } => -lambda * x,
            FamilySpec::Weibull { k } => -x.powf(k),
            FamilySpec::Erlang { shape, scale } => Self::erlang_log_survival(shape, x / scale),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lower || x >= s.upper {
            return 0.0;
        }
        match self.spec {
            FamilySpec::Uniform { b } => 1.0 / b,
            FamilySpec::Exponential { lambda } => lambda * (-lambda * x).exp(),
            _ => self.log_pdf(x).exp(),
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lower || x >= s.upper {
            return f64::NEG_INFINITY;
        }
        match self.spec {
            FamilySpec::Uniform { b } => -b.ln(),
            FamilySpec::Frechet { a, gamma } => {
                (a * gamma).ln() - (gamma + 1.0) * x.ln() - a * x.powf(-gamma)
            }
            FamilySpec::GompertzLike { c } => c.ln() + x - 2.0 * ln_expm1(x) - c / x.exp_m1(),
            FamilySpec::Power { alpha } => alpha.ln() + (alpha - 1.0) * x.ln(),
            FamilySpec::Exponential { lambda } => lambda.ln() - lambda * x,
            FamilySpec::Weibull { k } => k.ln() + (k - 1.0) * x.ln() - x.powf(k),
            FamilySpec::Erlang { shape, scale } => {
                let y = x / scale;
                (shape - 1) as f64 * y.ln() - y - ln_factorial(shape - 1) - scale.ln()
            }
        }
    }

    fn score(&self, x: f64) -> Option<f64> {
        if !self.support().contains(x) {
            return None;
        }
        Some(match self.spec {
            FamilySpec::Uniform { .. } => 0.0,
            FamilySpec::Frechet { a, gamma } => {
                -(gamma + 1.0) / x + a * gamma * x.powf(-gamma - 1.0)
            }
            FamilySpec::GompertzLike { c } => {
                // e^x/(e^x-1) = 1/(1-e^-x), e^x/(e^x-1)^2 = e^-x/(1-e^-x)^2
                let one_minus = -(-x).exp_m1();
                1.0 - 2.0 / one_minus + c * (-x).exp() / (one_minus * one_minus)
            }
            FamilySpec::Power { alpha } => (alpha - 1.0) / x,
            FamilySpec::Exponential { lambda } => -lambda,
            FamilySpec::Weibull { k } => (k - 1.0) / x - k * x.powf(k - 1.0),
            FamilySpec::Erlang { shape, scale } => (shape - 1) as f64 / x - 1.0 / scale,
        })
    }

    fn scale_hint(&self) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        match self.spec {
            FamilySpec::Uniform { b } => 0.5 * b,
            FamilySpec::Frechet { a, gamma } => (a / ln2).powf(1.0 / gamma),
            FamilySpec::GompertzLike { c } => (c / ln2).ln_1p(),
            FamilySpec::Power { alpha } => 0.5f64.powf(1.0 / alpha),
            FamilySpec::Exponential { lambda } => ln2 / lambda,
            FamilySpec::Weibull { k } => ln2.powf(1.0 / k),
            FamilySpec::Erlang { shape, scale } => shape as f64 * scale,
        }
    }

    fn tail_index(&self) -> Option<f64> {
        match self.spec {
            FamilySpec::Frechet { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    fn mgf_radius(&self) -> Option<f64> {
        Some(match self.spec {
            FamilySpec::Uniform { .. } | FamilySpec::Power { .. } => f64::INFINITY,
            FamilySpec::Frechet { .. } => 0.0,
            FamilySpec::GompertzLike { .. } => 1.0,
            FamilySpec::Exponential { lambda } => lambda,
            FamilySpec::Weibull { k } => {
                if k > 1.0 {
                    f64::INFINITY
                } else if k == 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FamilySpec::Erlang { scale, .. } => 1.0 / scale,
        })
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ParameterDomain {
                name: "p",
                value: p,
                reason: "probability must lie in (0, 1)",
            });
        }
        Ok(match self.spec {
            FamilySpec::Uniform { b } => p * b,
            FamilySpec::Frechet { a, gamma } => (a / -p.ln()).powf(1.0 / gamma),
            FamilySpec::GompertzLike { c } => (c / -p.ln()).ln_1p(),
            FamilySpec::Power { alpha } => p.powf(1.0 / alpha),
            FamilySpec::Exponential { lambda } => -(-p).ln_1p() / lambda,
            FamilySpec::Weibull { k } => (-(-p).ln_1p()).powf(1.0 / k),
            FamilySpec::Erlang { .. } => {
                let target = if p <= 0.5 { p.ln() } else { (-p).ln_1p() };
                if p <= 0.5 {
                    solve_increasing(self.support(), |x| self.log_cdf(x) - target)?
                } else {
                    solve_increasing(self.support(), |x| target - self.log_survival(x))?
                }
            }
        })
    }
}
