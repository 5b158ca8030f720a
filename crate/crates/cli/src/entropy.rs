//! Information measures of the sequence members.

use rayon::prelude::*;
use relevation::entropy::{ce_sequence, differential_entropy};
use relevation::{Distribution, QuadratureResult};

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::tables::sequence_for;
use crate::{CliError, Status};

pub const DEFAULT_DEPTH: usize = 4;

fn cell(r: relevation::Result<QuadratureResult>, status: &mut Status) -> Cell {
    match r {
        Ok(q) if q.converged && q.value.is_finite() => Cell::Num(q.value),
        _ => {
            *status = (*status).max(Status::NonConverged);
            Cell::Text("NC".into())
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(Table, Status), CliError> {
    let depth = cfg.depth_or(DEFAULT_DEPTH);
    let mut table = Table::new(vec!["family", "n", "mean", "cumulative_entropy", "differential_entropy"]);
    let mut status = Status::Ok;
    for f in &cfg.families {
        let seq = sequence_for(f, depth)?;
        let rows: Vec<_> = (1..=depth)
            .into_par_iter()
            .map(|n| {
                let m = seq.member(n);
                let mean = m.as_ref().map_err(Clone::clone).and_then(|m| m.mean());
                let ce = ce_sequence(&seq, n);
                let h = m.map(|m| differential_entropy(&m));
                (n, mean, ce, h)
            })
            .collect();
        for (n, mean, ce, h) in rows {
            let row = vec![
                Cell::Text(f.label.clone()),
                Cell::Int(n as i64),
                cell(mean, &mut status),
                cell(ce, &mut status),
                cell(h, &mut status),
            ];
            table.push(row);
        }
    }
    Ok((table, status))
}
