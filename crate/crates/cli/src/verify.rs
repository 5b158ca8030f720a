//! Verification batteries. Each check reports its worst case over families
//! members and grid points as `PASS|FAIL <suite>.<check> margin=<value>`,
//! where a nonnegative margin is the slack left under the tolerance.

use std::sync::Arc;

use rayon::prelude::*;
use relevation::distributions::quantile_grid;
use relevation::entropy::{
    conditional_expected_t, conditional_identities, dynamic_cumulative_entropy,
    unconditional_identities,
};
use relevation::operator::{
    by_parts_check, convolution_check, dual_operator, mgf_limit_check, operator_identity_check,
    operator_recursion_check, s0_corollary_check, Gap,
};
use relevation::orders::{check_lr, check_rrh, check_st, classify_aging, OrderReport, Verdict};
use relevation::transforms::{
    check_commutativity, parallel_transform, phr_closed_form, prhr_closed_form, relevation,
    reversed_relevation, series_transform, verify_st_bounds, Flavor, ProportionalModel,
    TransformKind, COMMUTATIVITY_GRID,
};
use relevation::{make_distribution, Distribution, FamilySpec, IteratedSequence};
use serde::Serialize;

use crate::config::{all_references, FamilyArg, RunConfig};
use crate::tables::sequence_for;
use crate::{CliError, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Orders,
    Operator,
    Transforms,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub margin: f64,
    pub passed: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {} margin={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.margin
        );
        if !self.converged {
            s.push_str(" nc");
        }
        if let Some(n) = &self.note {
            s.push(' ');
            s.push_str(n);
        }
        s
    }
}

/// Running maximum of a gap over many evaluations.
#[derive(Debug, Clone)]
struct Worst {
    gap: f64,
    converged: bool,
    note: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Self {
            gap: 0.0,
            converged: true,
            note: None,
        }
    }

    fn add(&mut self, gap: f64, converged: bool, at: impl FnOnce() -> String) {
        self.converged &= converged;
        if !(gap <= self.gap) {
            self.gap = if gap.is_nan() { f64::INFINITY } else { gap };
            self.note = Some(at());
        }
    }

    fn add_gap(&mut self, g: relevation::Result<Gap>, at: impl FnOnce() -> String) {
        match g {
            Ok(g) => self.add(g.gap, g.converged, at),
            Err(e) => self.fail(e, at),
        }
    }

    fn fail(&mut self, e: relevation::Error, at: impl FnOnce() -> String) {
        self.converged = false;
        self.gap = f64::INFINITY;
        self.note = Some(format!("{} error=\"{e}\"", at()));
    }

    fn check(self, name: String, tol: f64) -> Check {
        let margin = tol - self.gap;
        Check {
            name,
            margin,
            passed: self.converged && margin >= 0.0,
            converged: self.converged,
            note: if margin >= 0.0 { None } else { self.note },
        }
    }
}

fn order_check(name: String, reports: &[(String, OrderReport)]) -> Check {
    let mut margin = f64::INFINITY;
    let mut note = None;
    let mut passed = true;
    for (at, r) in reports {
        passed &= r.holds();
        if r.margin < margin {
            margin = r.margin;
            if !r.holds() {
                note = Some(format!("{at} witness={:?}", r.witness));
            }
        }
    }
    Check {
        name,
        margin,
        passed,
        converged: true,
        note,
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub families: Vec<FamilyArg>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
}

impl Options {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            families: cfg.families.clone(),
            depth: cfg.depth,
            tol: cfg.tol,
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn dist(spec: FamilySpec) -> Arc<dyn Distribution> {
    Arc::new(make_distribution(spec).expect("checked spec"))
}

fn per_family<F>(opts: &Options, depth: usize, f: F) -> Result<Vec<Check>, CliError>
where
    F: Fn(&FamilyArg, &IteratedSequence) -> Vec<Check> + Sync,
{
    let seqs = opts
        .families
        .iter()
        .map(|fam| Ok((fam, sequence_for(fam, depth + 2)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let groups: Vec<Vec<Check>> = seqs.par_iter().map(|(fam, s)| f(fam, s)).collect();
    Ok(groups.concat())
}

fn grid16(s: &IteratedSequence) -> Vec<f64> {
    quantile_grid(s.base().as_ref(), 16, 0.05, 0.95).unwrap_or_default()
}

pub fn identities(opts: &Options) -> Result<Vec<Check>, CliError> {
    let depth = opts.depth.unwrap_or(3);
    let tol = opts.tol(1e-7);
    let recursion_tol = opts.tol(1e-6);
    let mut out = per_family(opts, depth, |fam, s| {
        let l = &fam.label;
        let mut et = Worst::new();
        let mut cov = Worst::new();
        let mut ratio = Worst::new();
        let mut mit = Worst::new();
        let mut cond_t = Worst::new();
        let mut first = Worst::new();
        let mut second = Worst::new();
        let mut rec = Worst::new();
        let grid = grid16(s);
        for n in 1..=depth {
            match unconditional_identities(s, n) {
                Ok(u) => {
                    let ok = u.ce.converged;
                    et.add((u.expected_t.value - 1.0).abs(), ok && u.expected_t.converged, || format!("n={n}"));
                    cov.add((u.cov_x_t.value + u.ce.value).abs(), ok && u.cov_x_t.converged, || format!("n={n}"));
                    ratio.add(
                        (u.expected_t_over_tau.value - u.ce.value).abs(),
                        ok && u.expected_t_over_tau.converged,
                        || format!("n={n}"),
                    );
                    mit.add((u.expected_mit.value - u.ce.value).abs(), ok && u.expected_mit.converged, || format!("n={n}"));
                }
                Err(e) => {
                    for w in [&mut et, &mut cov, &mut ratio, &mut mit] {
                        w.fail(e.clone(), || format!("n={n}"));
                    }
                }
            }
            for &t in &grid {
                let at = || format!("n={n} t={t:.6}");
                match conditional_expected_t(s, n, t) {
                    Ok(r) => cond_t.add((r.value - 1.0 - s.t_n(n, t)).abs(), r.converged, at),
                    Err(e) => cond_t.fail(e, at),
                }
                match conditional_identities(s, n, t) {
                    Ok(c) => {
                        let (g1, g2) = c.gaps();
                        first.add(g1, c.lhs1.converged && c.rhs1.converged, at);
                        second.add(g2, c.lhs2.converged && c.rhs2.converged, at);
                    }
                    Err(e) => {
                        first.fail(e.clone(), at);
                        second.fail(e, at);
                    }
                }
            }
        }
        for n in 1..=depth + 1 {
            match s.mean_n(n + 1).and_then(|next| Ok((next, s.mean_n(n)?, relevation::entropy::ce_sequence(s, n)?))) {
                Ok((next, cur, ce)) => rec.add(
                    (next.direct.value - (cur.direct.value - ce.value)).abs(),
                    next.direct.converged && cur.direct.converged && ce.converged,
                    || format!("n={n}"),
                ),
                Err(e) => rec.fail(e, || format!("n={n}")),
            }
        }
        vec![
            et.check(format!("identities.expected_t[{l}]"), tol),
            cov.check(format!("identities.cov_x_t[{l}]"), tol),
            ratio.check(format!("identities.t_over_tau[{l}]"), tol),
            mit.check(format!("identities.ce_mean_inactivity[{l}]"), tol),
            cond_t.check(format!("identities.conditional_t[{l}]"), tol),
            first.check(format!("identities.conditional_first[{l}]"), tol),
            second.check(format!("identities.conditional_second[{l}]"), tol),
            rec.check(format!("identities.mean_recursion[{l}]"), recursion_tol),
        ]
    })?;
    if opts.families.iter().any(|f| f.letter() == Some('a')) {
        out.extend(uniform_example(opts));
    }
    Ok(out)
}

/// Closed forms for the uniform law on `(0, 2)`.
pub fn uniform_example(opts: &Options) -> Vec<Check> {
    let tol = opts.tol(1e-8);
    let dual_tol = opts.tol(1e-6);
    let s = IteratedSequence::new(dist(FamilySpec::Uniform { b: 2.0 })).expect("uniform");
    let b = Arc::clone(s.base());
    let mut ce = Worst::new();
    let mut mit = Worst::new();
    let mut dual = Worst::new();
    for i in 1..=16 {
        let t = 2.0 * i as f64 / 17.0;
        let at = || format!("t={t:.6}");
        match dynamic_cumulative_entropy(b.as_ref(), t) {
            Ok(d) => ce.add((d.value.value - t / 4.0).abs(), d.value.converged, at),
            Err(e) => ce.fail(e, at),
        }
        match b.mean_inactivity_time(t) {
            Ok(r) => mit.add((r.value - t / 2.0).abs(), r.converged, at),
            Err(e) => mit.fail(e, at),
        }
        let r = dual_operator(|x| s.cdf_n(2, x).unwrap_or(f64::NAN), 0.0, t);
        let exact = t * t / 4.0 * (1.5 - (t / 2.0).ln());
        dual.add((r.value - exact).abs(), r.converged, at);
    }
    let mut cov = Worst::new();
    match s.cov_consecutive(1) {
        Ok(r) => cov.add((r.value - 1.0 / 6.0).abs(), r.converged, String::new),
        Err(e) => cov.fail(e, String::new),
    }
    vec![
        ce.check("identities.uniform_dynamic_ce".into(), tol),
        mit.check("identities.uniform_mean_inactivity".into(), tol),
        cov.check("identities.uniform_cov_consecutive".into(), tol),
        dual.check("identities.uniform_dual_f2".into(), dual_tol),
    ]
}

pub fn orders(opts: &Options) -> Result<Vec<Check>, CliError> {
    let depth = opts.depth.unwrap_or(4);
    let mut out = per_family(opts, depth, |fam, s| {
        let l = &fam.label;
        let mut st = Vec::new();
        let mut lr = Vec::new();
        let mut rrh = Vec::new();
        for n in 1..=depth {
            let (Ok(a), Ok(b)) = (s.member(n), s.member(n + 1)) else {
                continue;
            };
            let at = format!("n={n}");
            st.push((at.clone(), check_st(&b, &a, s.grid())));
            lr.push((at.clone(), check_lr(&b, &a, s.grid())));
            rrh.push((at, check_rrh(&b, &a, s.grid())));
        }
        vec![
            order_check(format!("orders.st_decreasing[{l}]"), &st),
            order_check(format!("orders.lr_decreasing[{l}]"), &lr),
            order_check(format!("orders.rrh_decreasing[{l}]"), &rrh),
        ]
    })?;
    for alpha in [2.0, 1.1] {
        out.extend(power_aging(alpha));
    }
    Ok(out)
}

/// `X_1` is ILR for the power law; `X_2` is expected to lose it, shown by a
/// witness pair where the score increases.
pub fn power_aging(alpha: f64) -> Vec<Check> {
    let s = IteratedSequence::new(dist(FamilySpec::Power { alpha })).expect("power");
    let x1 = s.member(1).expect("depth 1");
    let x2 = s.member(2).expect("depth 2");
    let first = classify_aging(&x1, s.grid()).ilr;
    let second = classify_aging(&x2, s.grid()).ilr;
    let violated = second.verdict == Verdict::Violated && second.witness.is_some();
    vec![
        order_check(format!("orders.power_x1_ilr[alpha={alpha}]"), &[(String::new(), first)]),
        Check {
            name: format!("orders.power_x2_not_ilr[alpha={alpha}]"),
            margin: -second.margin,
            passed: violated,
            converged: true,
            note: Some(match second.witness {
                Some((a, b)) => format!("witness=({a:.6},{b:.6})"),
                None => "no violation on grid".into(),
            }),
        },
    ]
}

pub const LAPLACE_PAIRS: [(f64, f64); 8] = [
    (0.0, 0.5),
    (0.1, 1.0),
    (0.3, 0.2),
    (0.5, 2.0),
    (1.0, 1.5),
    (0.7, 0.8),
    (0.2, 3.0),
    (0.05, 0.1),
];

pub fn operator(opts: &Options) -> Result<Vec<Check>, CliError> {
    let depth = opts.depth.unwrap_or(3);
    let tol = opts.tol(1e-6);
    per_family(opts, depth, |fam, s| {
        let l = &fam.label;
        let d = s.base();
        let upper = d.support().upper;
        let mut laplace = Worst::new();
        for &(sv, t) in &LAPLACE_PAIRS {
            laplace.add_gap(operator_identity_check(|x| d.pdf(x), sv, t, upper), || format!("s={sv} t={t}"));
        }
        let mut parts = Worst::new();
        let mut conv = Worst::new();
        for &(sv, t) in &[(0.5, 1.0), (2.0, 0.4), (-0.5, 1.2)] {
            parts.add_gap(Ok(by_parts_check(d.as_ref(), sv, t)), || format!("s={sv} t={t}"));
            if sv > 0.0 {
                conv.add_gap(convolution_check(d.as_ref(), sv, t), || format!("s={sv} t={t}"));
            }
        }
        let mut mgf = Worst::new();
        let radius = d.mgf_radius().unwrap_or(0.0);
        for sv in [0.0, 0.25] {
            if sv < radius {
                match mgf_limit_check(d.as_ref(), sv) {
                    Ok(c) => mgf.add(c.gap, c.converged, || format!("s={sv}")),
                    Err(e) => mgf.fail(e, || format!("s={sv}")),
                }
            }
        }
        let mut rec = Worst::new();
        let mut cor = Worst::new();
        let grid = quantile_grid(d.as_ref(), 4, 0.2, 0.8).unwrap_or_default();
        for n in 1..=depth {
            for &t in &grid {
                cor.add_gap(s0_corollary_check(s, n, t), || format!("n={n} t={t:.6}"));
                for sv in [0.0, 0.5] {
                    rec.add_gap(operator_recursion_check(s, n, sv, t), || format!("n={n} s={sv} t={t:.6}"));
                }
            }
        }
        vec![
            laplace.check(format!("operator.laplace_identity[{l}]"), tol),
            parts.check(format!("operator.by_parts[{l}]"), tol),
            conv.check(format!("operator.convolution[{l}]"), tol),
            mgf.check(format!("operator.mgf_limit[{l}]"), tol),
            rec.check(format!("operator.recursion[{l}]"), tol),
            cor.check(format!("operator.s0_corollary[{l}]"), tol),
        ]
    })
}

pub const THETAS: [f64; 3] = [0.5, 2.0, 3.0];
pub const SYSTEM_SIZES: [u32; 2] = [2, 3];

pub fn transforms(opts: &Options) -> Result<Vec<Check>, CliError> {
    let tol = opts.tol(1e-8);
    let mut out = per_family(opts, 1, |fam, s| {
        let l = &fam.label;
        let base = Arc::clone(s.base());
        let grid = quantile_grid(base.as_ref(), COMMUTATIVITY_GRID, 0.02, 0.98).unwrap_or_default();
        let fine = quantile_grid(base.as_ref(), 32, 0.01, 0.99).unwrap_or_default();
        let model = |theta: f64, flavor| -> Arc<dyn Distribution> {
            Arc::new(ProportionalModel::new(Arc::clone(&base), theta, flavor).expect("positive theta"))
        };
        let mut prhr_comm = Worst::new();
        let mut phr_comm = Worst::new();
        let mut prhr = Worst::new();
        let mut phr = Worst::new();
        for theta in THETAS {
            for (w, flavor, kind) in [
                (&mut prhr_comm, Flavor::ReversedHazards, TransformKind::ReversedRelevation),
                (&mut phr_comm, Flavor::Hazards, TransformKind::Relevation),
            ] {
                let r = check_commutativity(Arc::clone(&base), model(theta, flavor), kind, &grid, tol);
                w.add(r.max_abs_gap, r.non_converged.is_empty(), || {
                    format!("theta={theta} x={:.6}", r.worst_point)
                });
            }
            let pm = ProportionalModel::new(Arc::clone(&base), theta, Flavor::ReversedHazards).expect("theta");
            let hm = ProportionalModel::new(Arc::clone(&base), theta, Flavor::Hazards).expect("theta");
            let rev = reversed_relevation(model(theta, Flavor::ReversedHazards), Arc::clone(&base));
            let rel = relevation(model(theta, Flavor::Hazards), Arc::clone(&base));
            for &x in &fine {
                let at = || format!("theta={theta} x={x:.6}");
                let q = rev.cdf_checked(x);
                match prhr_closed_form(&pm, x) {
                    Ok(c) => prhr.add((q.value - c).abs(), q.converged, at),
                    Err(e) => prhr.fail(e, at),
                }
                let q = rel.survival_checked(x);
                match phr_closed_form(&hm, x) {
                    Ok(c) => phr.add((q.value - c).abs(), q.converged, at),
                    Err(e) => phr.fail(e, at),
                }
            }
        }
        let mut par = Worst::new();
        let mut ser = Worst::new();
        for m in SYSTEM_SIZES {
            for theta in THETAS {
                if theta == m as f64 {
                    // Limiting form, not covered by the closed form.
                    continue;
                }
                let (p, q) = match (
                    parallel_transform(Arc::clone(&base), m, theta),
                    series_transform(Arc::clone(&base), m, theta),
                ) {
                    (Ok(p), Ok(q)) => (p, q),
                    (Err(e), _) | (_, Err(e)) => {
                        par.fail(e.clone(), || format!("m={m} theta={theta}"));
                        ser.fail(e, || format!("m={m} theta={theta}"));
                        continue;
                    }
                };
                let rev = reversed_relevation(
                    model(m as f64, Flavor::ReversedHazards),
                    model(theta, Flavor::ReversedHazards),
                );
                let rel = relevation(model(m as f64, Flavor::Hazards), model(theta, Flavor::Hazards));
                for &x in &fine {
                    let at = || format!("m={m} theta={theta} x={x:.6}");
                    let a = rev.cdf_checked(x);
                    par.add((a.value - p.cdf(x)).abs(), a.converged, at);
                    let b = rel.survival_checked(x);
                    ser.add((b.value - q.survival(x)).abs(), b.converged, at);
                }
            }
        }
        let mut bounds = Vec::new();
        for g in all_references() {
            let b = verify_st_bounds(Arc::clone(&base), dist(g.spec), &fine);
            bounds.push((format!("with={} lower", g.label), b.lower));
            bounds.push((format!("with={} upper", g.label), b.upper));
        }
        vec![
            prhr_comm.check(format!("transforms.prhr_commutes[{l}]"), tol),
            phr_comm.check(format!("transforms.phr_commutes[{l}]"), tol),
            prhr.check(format!("transforms.prhr_closed_form[{l}]"), tol),
            phr.check(format!("transforms.phr_closed_form[{l}]"), tol),
            par.check(format!("transforms.parallel_mixture[{l}]"), tol),
            ser.check(format!("transforms.series_mixture[{l}]"), tol),
            order_check(format!("transforms.st_bounds[{l}]"), &bounds),
        ]
    })?;
    out.push(noncommuting_pair());
    Ok(out)
}

/// Exponential and Weibull(2) under the reversed relevation do not commute:
/// the largest gap must exceed `1e-3`.
pub fn noncommuting_pair() -> Check {
    let e = dist(FamilySpec::Exponential { lambda: 1.0 });
    let w = dist(FamilySpec::Weibull { k: 2.0 });
    let grid = quantile_grid(e.as_ref(), COMMUTATIVITY_GRID, 0.02, 0.98).unwrap_or_default();
    let r = check_commutativity(e, w, TransformKind::ReversedRelevation, &grid, 1e-3);
    Check {
        name: "transforms.noncommuting_pair[exponential,weibull]".into(),
        margin: r.max_abs_gap - 1e-3,
        passed: !r.commutes && r.non_converged.is_empty(),
        converged: r.non_converged.is_empty(),
        note: Some(format!("gap={:.6} witness={:.6}", r.max_abs_gap, r.worst_point)),
    }
}

pub fn run_suite(suite: Suite, opts: &Options) -> Result<Vec<Check>, CliError> {
    Ok(match suite {
        Suite::Identities => identities(opts)?,
        Suite::Orders => orders(opts)?,
        Suite::Operator => operator(opts)?,
        Suite::Transforms => transforms(opts)?,
        Suite::All => {
            let mut v = identities(opts)?;
            v.extend(orders(opts)?);
            v.extend(operator(opts)?);
            v.extend(transforms(opts)?);
            v
        }
    })
}

pub fn status(checks: &[Check]) -> Status {
    checks.iter().fold(Status::Ok, |s, c| {
        if !c.converged {
            s.max(Status::NonConverged)
        } else if !c.passed {
            s.max(Status::Failed)
        } else {
            s
        }
    })
}
