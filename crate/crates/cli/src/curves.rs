//! Cdfs of `X_1..X_depth` on an even grid.

use rayon::prelude::*;
use relevation::Distribution;

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::tables::sequence_for;
use crate::{CliError, Status};

pub const DEFAULT_DEPTH: usize = 5;
/// Grid end for unbounded supports, as an upper-tail probability.
pub const TAIL: f64 = 1e-7;

const HEADERS: [&str; 12] = ["F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9", "F10", "F11", "F12"];

/// Right end of the grid: the support end when bounded, else the
/// `1 - TAIL` quantile.
pub fn grid_end<D: Distribution + ?Sized>(d: &D) -> Result<f64, CliError> {
    let s = d.support();
    if s.is_bounded() {
        Ok(s.upper)
    } else {
        d.inverse_survival(TAIL).map_err(CliError::numerical)
    }
}

pub fn run(cfg: &RunConfig) -> Result<(Table, Status), CliError> {
    let depth = cfg.depth_or(DEFAULT_DEPTH);
    if depth > HEADERS.len() {
        return Err(CliError::Usage(format!("curves supports depth up to {}", HEADERS.len())));
    }
    let mut header = vec!["family", "x"];
    header.extend(&HEADERS[..depth]);
    let mut table = Table::new(header);
    for f in &cfg.families {
        let seq = sequence_for(f, depth)?;
        let hi = grid_end(seq.base().as_ref())?;
        let n = cfg.grid;
        let rows: Vec<Result<Vec<Cell>, CliError>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = hi * (i + 1) as f64 / n as f64;
                let mut row = vec![Cell::Text(f.label.clone()), Cell::Num(x)];
                for k in 1..=depth {
                    row.push(Cell::Num(seq.cdf_n(k, x).map_err(CliError::numerical)?));
                }
                Ok(row)
            })
            .collect();
        for r in rows {
            table.push(r?);
        }
    }
    Ok((table, Status::Ok))
}
