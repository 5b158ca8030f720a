//! Monte Carlo estimates set against quadrature values.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use relevation::entropy::ce_sequence;
use relevation::montecarlo::{
    mc_covariance, mc_expectation, sample_base, sample_consecutive_pairs, sample_sequence,
    McEstimate, SampleBatch, SamplingMethod,
};
use relevation::{Distribution, IteratedSequence, QuadratureResult};
use serde::Serialize;

use crate::config::{FamilyArg, RunConfig};
use crate::output::sig6;
use crate::tables::sequence_for;
use crate::{CliError, Status};

pub const DEFAULT_DEPTH: usize = 2;
/// Largest accepted standardized gap.
pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Inverse,
    Rejection,
    Conditional,
}

impl From<Method> for SamplingMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Inverse => SamplingMethod::Inverse,
            Method::Rejection => SamplingMethod::Rejection,
            Method::Conditional => SamplingMethod::Conditional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McLine {
    pub name: String,
    pub mc: f64,
    pub standard_error: f64,
    pub quad: f64,
    pub z: f64,
}

impl McLine {
    fn new(name: String, est: McEstimate, quad: f64) -> Self {
        Self {
            name,
            mc: est.estimate,
            standard_error: est.standard_error,
            quad,
            z: est.z_score(quad),
        }
    }

    pub fn line(&self) -> String {
        format!("{} mc={} quad={} z={:.3}", self.name, sig6(self.mc), sig6(self.quad), self.z)
    }
}

fn quad(r: relevation::Result<QuadratureResult>) -> Result<f64, CliError> {
    r.and_then(|q| q.require("quadrature reference")).map_err(CliError::numerical)
}

fn sampling(e: relevation::Error) -> CliError {
    CliError::Failed(format!("sampling failed: {e}"))
}

/// Draws of `X_depth`; depth 1 is the base law.
pub fn draw(seq: &IteratedSequence, depth: usize, n: usize, seed: u64, method: Method) -> Result<SampleBatch, CliError> {
    if depth == 1 {
        sample_base(seq.base().as_ref(), n, seed).map_err(sampling)
    } else {
        sample_sequence(seq, depth, n, seed, method.into()).map_err(sampling)
    }
}

/// Mean of `X_depth`, the entropy of `X_{depth-1}` through `E[mit(X)]`, and
/// the covariance of consecutive members.
pub fn estimates(
    f: &FamilyArg,
    depth: usize,
    samples: usize,
    seed: u64,
    method: Method,
) -> Result<(Vec<McLine>, SampleBatch), CliError> {
    if depth < 2 {
        return Err(CliError::Usage("mc needs depth at least 2".into()));
    }
    let seq = sequence_for(f, depth)?;
    let l = &f.label;
    let n = depth;
    let member = seq.member(n).map_err(CliError::numerical)?;
    let batch = draw(&seq, n, samples, seed, method)?;
    let mean = McLine::new(format!("mean_x{n}[{l}]"), mc_expectation(&batch, |x| x), quad(member.mean())?);

    let prev = seq.member(n - 1).map_err(CliError::numerical)?;
    let prev_batch = draw(&seq, n - 1, samples, seed.wrapping_add(1), Method::Inverse)?;
    let mit = mc_expectation(&prev_batch, |x| {
        prev.mean_inactivity_time(x).map_or(f64::NAN, |r| r.value)
    });
    let ce = McLine::new(format!("ce_x{}[{l}]", n - 1), mit, quad(ce_sequence(&seq, n - 1))?);

    let pairs = sample_consecutive_pairs(&seq, n - 1, samples, seed.wrapping_add(2)).map_err(sampling)?;
    let cov = McLine::new(
        format!("cov_x{}_x{n}[{l}]", n - 1),
        mc_covariance(&pairs),
        quad(seq.cov_consecutive(n - 1))?,
    );
    Ok((vec![mean, ce, cov], batch))
}

pub fn run(cfg: &RunConfig, method: Method, batch_out: Option<&PathBuf>) -> Result<(Vec<McLine>, Status), CliError> {
    let depth = cfg.depth_or(DEFAULT_DEPTH);
    let mut lines = Vec::new();
    let mut batches = Vec::new();
    for f in &cfg.families {
        let (l, b) = estimates(f, depth, cfg.samples, cfg.seed, method)?;
        lines.extend(l);
        batches.push(b);
    }
    if let Some(path) = batch_out {
        if batches.len() != 1 {
            return Err(CliError::Usage("--batch-out needs exactly one family".into()));
        }
        let file = File::create(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        batches[0]
            .write_csv(BufWriter::new(file))
            .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    }
    let status = if lines.iter().all(|l| l.z.abs() <= Z_LIMIT) {
        Status::Ok
    } else {
        Status::Failed
    };
    Ok((lines, status))
}
