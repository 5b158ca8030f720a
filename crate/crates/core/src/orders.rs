//! Stochastic orders and aging classes checked on finite grids.
//!
//! A pass is reported as [`Verdict::HoldsOnGrid`]; the definitions quantify
//! over a continuum, so a grid pass is evidence, not proof. Monotonicity
//! checks tolerate adjacent-point reversals up to `1e-9` relative.

use std::fmt;

use serde::Serialize;

use crate::distributions::{quantile_grid, Distribution};
use crate::error::Result;
use crate::numerics;
use crate::sequence::IteratedSequence;

pub const MONOTONE_TOLERANCE: f64 = 1e-9;
pub const POINTWISE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GRID_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    St,
    Lr,
    LrUp,
    Rrh,
    Ilr,
    Dlr,
    Drhr,
    LbDrhr,
    QTauDecreasing,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::St => "st",
            Relation::Lr => "lr",
            Relation::LrUp => "lr_up",
            Relation::Rrh => "rrh",
            Relation::Ilr => "ilr",
            Relation::Dlr => "dlr",
            Relation::Drhr => "drhr",
            Relation::LbDrhr => "lb_drhr",
            Relation::QTauDecreasing => "q_tau_decreasing",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
}

/// Outcome of a grid check.
///
/// `margin` is the smallest slack seen on the grid: nonnegative (up to the
/// tolerance) when the relation holds. For a violation, `witness` holds the
/// pair of points where the defining inequality fails by the most.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub relation: Relation,
    pub verdict: Verdict,
    pub witness: Option<(f64, f64)>,
    pub margin: f64,
    pub points: usize,
    pub skipped: usize,
}

impl OrderReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }
}

/// Default grid: 256 quantiles of `d` spanning `1e-4 .. 1 - 1e-4`.
pub fn default_grid<D: Distribution + ?Sized>(d: &D) -> Result<Vec<f64>> {
    quantile_grid(d, DEFAULT_GRID_POINTS, 1e-4, 1.0 - 1e-4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Increasing,
    Decreasing,
}

/// Checks monotonicity of `(x, v)` pairs; non-finite values are skipped.
/// Tolerance is relative to the larger neighbour, with unit floor when
/// `absolute_floor` is set (used for log-scale values).
fn monotone(
    relation: Relation,
    values: &[(f64, f64)],
    direction: Direction,
    absolute_floor: bool,
) -> OrderReport {
    let finite: Vec<(f64, f64)> = values.iter().copied().filter(|(_, v)| v.is_finite()).collect();
    let skipped = values.len() - finite.len();
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for pair in finite.windows(2) {
        let (x0, v0) = pair[0];
        let (x1, v1) = pair[1];
        let step = match direction {
            Direction::Increasing => v1 - v0,
            Direction::Decreasing => v0 - v1,
        };
        let mut scale = v0.abs().max(v1.abs());
        if absolute_floor {
            scale = scale.max(1.0);
        }
        let slack = if scale > 0.0 { step / scale } else { 0.0 };
        if slack < margin {
            margin = slack;
            witness = Some((x0, x1));
        }
    }
    if margin == f64::INFINITY {
        margin = 0.0;
    }
    let verdict = if margin < -MONOTONE_TOLERANCE {
        Verdict::Violated
    } else {
        Verdict::HoldsOnGrid
    };
    OrderReport {
        relation,
        verdict,
        witness: if verdict == Verdict::Violated { witness } else { None },
        margin,
        points: finite.len(),
        skipped,
    }
}

/// `X <=st Y` for `X ~ f`, `Y ~ g`: `F(t) >= G(t)` at every grid point.
pub fn check_st<F, G>(f: &F, g: &G, grid: &[f64]) -> OrderReport
where
    F: Distribution + ?Sized,
    G: Distribution + ?Sized,
{
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for &t in grid {
        let slack = f.cdf(t) - g.cdf(t);
        if slack < margin {
            margin = slack;
            witness = Some((t, t));
        }
    }
    if margin == f64::INFINITY {
        margin = 0.0;
    }
    let verdict = if margin < -POINTWISE_TOLERANCE {
        Verdict::Violated
    } else {
        Verdict::HoldsOnGrid
    };
    OrderReport {
        relation: Relation::St,
        verdict,
        witness: if verdict == Verdict::Violated { witness } else { None },
        margin,
        points: grid.len(),
        skipped: 0,
    }
}

/// `X <=lr Y`: `g/f` increasing, checked on `ln g - ln f`.
pub fn check_lr<F, G>(f: &F, g: &G, grid: &[f64]) -> OrderReport
where
    F: Distribution + ?Sized,
    G: Distribution + ?Sized,
{
    let values: Vec<(f64, f64)> = grid.iter().map(|&t| (t, g.log_pdf(t) - f.log_pdf(t))).collect();
    monotone(Relation::Lr, &values, Direction::Increasing, true)
}

/// `X <=lr-up Y`: `g(t) / f(t + s)` increasing in `t` for each shift `s`.
pub fn check_lr_up<F, G>(f: &F, g: &G, grid: &[f64], shifts: &[f64]) -> OrderReport
where
    F: Distribution + ?Sized,
    G: Distribution + ?Sized,
{
    let mut worst: Option<OrderReport> = None;
    let mut skipped = 0;
    for &s in shifts {
        let values: Vec<(f64, f64)> = grid
            .iter()
            .map(|&t| (t, g.log_pdf(t) - f.log_pdf(t + s)))
            .collect();
        let r = monotone(Relation::LrUp, &values, Direction::Increasing, true);
        skipped += r.skipped;
        if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
            worst = Some(r);
        }
    }
    let mut report = worst.unwrap_or(OrderReport {
        relation: Relation::LrUp,
        verdict: Verdict::HoldsOnGrid,
        witness: None,
        margin: 0.0,
        points: 0,
        skipped: 0,
    });
    report.skipped = skipped;
    report
}

/// `X <=RRH Y`: `tau_Y / tau_X` increasing, checked on the log ratio.
pub fn check_rrh<F, G>(f: &F, g: &G, grid: &[f64]) -> OrderReport
where
    F: Distribution + ?Sized,
    G: Distribution + ?Sized,
{
    let values: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| {
            let v = match (f.reversed_hazard(t), g.reversed_hazard(t)) {
                (Ok(a), Ok(b)) if a > 0.0 && b > 0.0 => b.ln() - a.ln(),
                _ => f64::NAN,
            };
            (t, v)
        })
        .collect();
    monotone(Relation::Rrh, &values, Direction::Increasing, true)
}

/// `f'/f`, analytic when the distribution provides it, else a central
/// difference of `ln f`.
fn scores<D: Distribution + ?Sized>(d: &D, grid: &[f64]) -> Vec<(f64, f64)> {
    let analytic = grid.first().and_then(|&x| d.score(x)).is_some();
    if analytic {
        grid.iter().map(|&x| (x, d.score(x).unwrap_or(f64::NAN))).collect()
    } else {
        // The outer two points on each side are excluded.
        let inner = if grid.len() > 4 { &grid[2..grid.len() - 2] } else { grid };
        inner
            .iter()
            .map(|&x| (x, numerics::differentiate(|y| d.log_pdf(y), x, None)))
            .collect()
    }
}

/// Aging classes of a single distribution on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgingReport {
    pub ilr: OrderReport,
    pub dlr: OrderReport,
    pub drhr: OrderReport,
    pub lb_drhr: OrderReport,
}

pub fn classify_aging<D: Distribution + ?Sized>(d: &D, grid: &[f64]) -> AgingReport {
    let s = scores(d, grid);
    let tau: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, d.reversed_hazard(x).unwrap_or(f64::NAN)))
        .collect();
    let x_tau: Vec<(f64, f64)> = tau.iter().map(|&(x, t)| (x, x * t)).collect();
    AgingReport {
        ilr: monotone(Relation::Ilr, &s, Direction::Decreasing, true),
        dlr: monotone(Relation::Dlr, &s, Direction::Increasing, true),
        drhr: monotone(Relation::Drhr, &tau, Direction::Decreasing, false),
        lb_drhr: monotone(Relation::LbDrhr, &x_tau, Direction::Decreasing, false),
    }
}

/// DLR through convexity of `ln f`: divided-difference slopes of `ln f`
/// must be nondecreasing, up to `1e-8`.
pub fn check_log_convex<D: Distribution + ?Sized>(d: &D, grid: &[f64]) -> OrderReport {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, d.log_pdf(x)))
        .filter(|(_, v)| v.is_finite())
        .collect();
    let skipped = grid.len() - pts.len();
    let slopes: Vec<(f64, f64)> = pts
        .windows(2)
        .map(|w| (0.5 * (w[0].0 + w[1].0), (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
        .collect();
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for w in slopes.windows(2) {
        let slack = (w[1].1 - w[0].1) / w[0].1.abs().max(w[1].1.abs()).max(1.0);
        if slack < margin {
            margin = slack;
            witness = Some((w[0].0, w[1].0));
        }
    }
    if margin == f64::INFINITY {
        margin = 0.0;
    }
    let verdict = if margin < -1e-8 {
        Verdict::Violated
    } else {
        Verdict::HoldsOnGrid
    };
    OrderReport {
        relation: Relation::Dlr,
        verdict,
        witness: if verdict == Verdict::Violated { witness } else { None },
        margin,
        points: pts.len(),
        skipped,
    }
}

/// Whether `q tau_n` decreases for every `n <= n_max` given that `q tau_1`
/// does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QTauReport {
    pub premise: OrderReport,
    /// Reports for `n = 2 ..= n_max`; empty when the premise fails.
    pub members: Vec<OrderReport>,
}

impl QTauReport {
    pub fn preserved(&self) -> bool {
        self.premise.holds() && self.members.iter().all(OrderReport::holds)
    }
}

pub fn check_q_tau_preservation<Q>(
    seq: &IteratedSequence,
    q: Q,
    n_max: usize,
    grid: &[f64],
) -> Result<QTauReport>
where
    Q: Fn(f64) -> f64,
{
    let eval = |n: usize| -> Result<OrderReport> {
        let m = seq.member(n)?;
        let values: Vec<(f64, f64)> = grid
            .iter()
            .map(|&x| (x, q(x) * m.reversed_hazard(x).unwrap_or(f64::NAN)))
            .collect();
        Ok(monotone(Relation::QTauDecreasing, &values, Direction::Decreasing, false))
    };
    let premise = eval(1)?;
    let mut members = Vec::new();
    if premise.holds() {
        for n in 2..=n_max {
            members.push(eval(n)?);
        }
    }
    Ok(QTauReport { premise, members })
}
