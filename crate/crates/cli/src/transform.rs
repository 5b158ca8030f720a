//! Cdf and density of a transformed law on a quantile grid of the first
//! family.

use std::sync::Arc;

use rayon::prelude::*;
use relevation::distributions::quantile_grid;
use relevation::transforms::{
    parallel_transform, phr_closed_form, prhr_closed_form, relevation, reversed_relevation,
    series_transform, Flavor, ProportionalModel, TransformedDistribution,
};
use relevation::{make_distribution, Distribution};

use crate::config::{FamilyArg, RunConfig};
use crate::output::{Cell, Table};
use crate::{CliError, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// `G #~ F` with `G` from `--with`.
    Reversed,
    /// `G # F` with `G` from `--with`.
    Relevation,
    /// `F^theta #~ F` against its closed form.
    Prhr,
    /// Relevation of `F` by its proportional hazards model.
    Phr,
    /// Maximum of `m` components inspected at `F^theta`.
    Parallel,
    /// Minimum of `m` components inspected by the hazards model.
    Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformArgs {
    pub kind: Kind,
    pub with: Option<FamilyArg>,
    pub theta: f64,
    pub m: u32,
}

type ClosedForm = Box<dyn Fn(f64) -> relevation::Result<f64> + Sync + Send>;

fn dist(f: &FamilyArg) -> Result<Arc<dyn Distribution>, CliError> {
    Ok(Arc::new(make_distribution(f.spec).map_err(|e| CliError::Usage(e.to_string()))?))
}

fn model(base: &Arc<dyn Distribution>, theta: f64, flavor: Flavor) -> Result<ProportionalModel, CliError> {
    ProportionalModel::new(Arc::clone(base), theta, flavor).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(cfg: &RunConfig, args: &TransformArgs) -> Result<(Table, Status), CliError> {
    let mut table = Table::new(vec!["family", "x", "cdf", "pdf", "closed_form"]);
    let mut status = Status::Ok;
    for f in &cfg.families {
        let base = dist(f)?;
        // Generic quadrature transform and, where one exists, its closed form.
        let (generic, closed): (TransformedDistribution, Option<ClosedForm>) =
            match args.kind {
                Kind::Reversed | Kind::Relevation => {
                    let g = args
                        .with
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--with is required for this kind".into()))?;
                    let g = dist(g)?;
                    let t = if args.kind == Kind::Reversed {
                        reversed_relevation(g, Arc::clone(&base))
                    } else {
                        relevation(g, Arc::clone(&base))
                    };
                    (t, None)
                }
                Kind::Prhr => {
                    let pm = model(&base, args.theta, Flavor::ReversedHazards)?;
                    let t = reversed_relevation(Arc::new(pm.clone()), Arc::clone(&base));
                    (t, Some(Box::new(move |x| prhr_closed_form(&pm, x))))
                }
                Kind::Phr => {
                    let hm = model(&base, args.theta, Flavor::Hazards)?;
                    let t = relevation(Arc::new(hm.clone()), Arc::clone(&base));
                    (t, Some(Box::new(move |x| phr_closed_form(&hm, x).map(|s| 1.0 - s))))
                }
                Kind::Parallel | Kind::Series => {
                    let m = args.m as f64;
                    let (flavor, sys) = if args.kind == Kind::Parallel {
                        (Flavor::ReversedHazards, parallel_transform(Arc::clone(&base), args.m, args.theta))
                    } else {
                        (Flavor::Hazards, series_transform(Arc::clone(&base), args.m, args.theta))
                    };
                    let sys = sys.map_err(|e| CliError::Usage(e.to_string()))?;
                    let system: Arc<dyn Distribution> = Arc::new(model(&base, m, flavor)?);
                    let inspector: Arc<dyn Distribution> = Arc::new(model(&base, args.theta, flavor)?);
                    let t = if args.kind == Kind::Parallel {
                        reversed_relevation(system, inspector)
                    } else {
                        relevation(system, inspector)
                    };
                    (t, Some(Box::new(move |x| Ok(sys.cdf(x)))))
                }
            };
        let grid = quantile_grid(base.as_ref(), cfg.grid, 1e-3, 1.0 - 1e-3).map_err(CliError::numerical)?;
        let rows: Vec<Result<(Vec<Cell>, bool), CliError>> = grid
            .par_iter()
            .map(|&x| {
                let cdf = generic.cdf_checked(x);
                let closed = match &closed {
                    Some(c) => Cell::Num(c(x).map_err(CliError::numerical)?),
                    None => Cell::Empty,
                };
                let row = vec![
                    Cell::Text(f.label.clone()),
                    Cell::Num(x),
                    Cell::Num(cdf.value),
                    Cell::Num(generic.pdf(x)),
                    closed,
                ];
                Ok((row, cdf.converged))
            })
            .collect();
        for r in rows {
            let (row, converged) = r?;
            if !converged {
                status = status.max(Status::NonConverged);
            }
            table.push(row);
        }
    }
    Ok((table, status))
}
