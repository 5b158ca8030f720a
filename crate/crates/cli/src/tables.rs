//! Means and cumulative entropies of the sequence members.

use std::sync::Arc;

use rayon::prelude::*;
use relevation::entropy::ce_sequence;
use relevation::{make_distribution, IteratedSequence};

use crate::config::{FamilyArg, RunConfig};
use crate::output::{Cell, Table};
use crate::paper::{self, Quantity};
use crate::{CliError, Status};

pub const DEFAULT_DEPTH: usize = 5;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

/// One computed table entry; `None` marks a cell that did not converge.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub family: String,
    pub letter: Option<char>,
    pub quantity: Quantity,
    pub n: usize,
    pub value: Option<f64>,
}

pub fn sequence_for(f: &FamilyArg, depth: usize) -> Result<IteratedSequence, CliError> {
    let d = make_distribution(f.spec).map_err(|e| CliError::Usage(e.to_string()))?;
    IteratedSequence::with_max_depth(Arc::new(d), depth.max(relevation::sequence::DEFAULT_MAX_DEPTH))
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// `E(X_1..X_depth)` and `CE(X_1..X_{depth-1})` for every family.
pub fn compute(families: &[FamilyArg], depth: usize) -> Result<Vec<TableCell>, CliError> {
    let mut jobs = Vec::new();
    for f in families {
        let seq = Arc::new(sequence_for(f, depth)?);
        for n in 1..=depth {
            jobs.push((f, Arc::clone(&seq), Quantity::Mean, n));
        }
        for n in 1..depth {
            jobs.push((f, Arc::clone(&seq), Quantity::CumulativeEntropy, n));
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(f, seq, quantity, n)| {
            let r = match quantity {
                Quantity::Mean => seq.member(n).and_then(|m| relevation::Distribution::mean(&m)),
                Quantity::CumulativeEntropy => ce_sequence(&seq, n),
            };
            let value = match r {
                Ok(q) if q.converged && q.value.is_finite() => Some(q.value),
                _ => None,
            };
            TableCell {
                family: f.label.clone(),
                letter: f.letter(),
                quantity,
                n,
                value,
            }
        })
        .collect())
}

pub fn run(cfg: &RunConfig) -> Result<(Table, Status), CliError> {
    let depth = cfg.depth_or(DEFAULT_DEPTH);
    let tol = cfg.tol.unwrap_or(DEFAULT_TOLERANCE);
    let cells = compute(&cfg.families, depth)?;
    let mut header = vec!["family", "quantity", "n", "value"];
    if cfg.compare_paper {
        header.extend(["paper", "deviation", "status"]);
    }
    let mut table = Table::new(header);
    let mut status = Status::Ok;
    for c in &cells {
        let mut row = vec![
            Cell::Text(c.family.clone()),
            Cell::Text(c.quantity.label().into()),
            Cell::Int(c.n as i64),
            c.value.map_or(Cell::Text("NC".into()), |v| Cell::Fixed(v, 5)),
        ];
        if c.value.is_none() {
            status = status.max(Status::NonConverged);
        }
        if cfg.compare_paper {
            let printed = c.letter.and_then(|l| paper::value(c.quantity, l, c.n));
            let accepted = c.letter.and_then(|l| paper::accepted_value(c.quantity, l, c.n));
            match (printed, accepted, c.value) {
                (Some(p), Some((a, erratum)), Some(v)) => {
                    let ok = (v - a).abs() <= tol;
                    if !ok {
                        status = status.max(Status::Failed);
                    }
                    let label = match (ok, erratum) {
                        (true, false) => "ok",
                        (true, true) => "ok-erratum",
                        (false, _) => "off",
                    };
                    row.extend([Cell::Fixed(p, 5), Cell::Fixed(v - p, 5), Cell::Text(label.into())]);
                }
                (Some(p), _, None) => row.extend([Cell::Fixed(p, 5), Cell::Empty, Cell::Text("NC".into())]),
                _ => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
        }
        table.push(row);
    }
    Ok((table, status))
}
