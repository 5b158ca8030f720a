//! Command-line front end: tables of means and cumulative entropies, cdf
//! curves, transforms, verification batteries and Monte Carlo checks.

// `!(x > 0.0)` style tests are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod curves;
pub mod entropy;
pub mod mc;
pub mod output;
pub mod paper;
pub mod tables;
pub mod transform;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{all_references, FamilyArg, Format, RunConfig, Settings};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Failed,
    NonConverged,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::NonConverged => 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    NonConverged(String),
    Failed(String),
}

impl CliError {
    pub fn numerical(e: relevation::Error) -> Self {
        use relevation::Error::*;
        match e {
            NotConverged { .. } | Divergence(_) => CliError::NonConverged(e.to_string()),
            ParameterDomain { .. } | Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NonConverged(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::NonConverged(m) => write!(f, "no convergence: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "relevation", version, about = "Reversed relevation sequences: tables, curves and checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Starting law: a reference letter `a`..`f` or a spec such as
    /// `weibull:k=3`. Repeat for several.
    #[arg(long, global = true)]
    pub family: Vec<String>,
    /// Deepest sequence member used.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Number of grid points for curves and transforms.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Replaces the default tolerance of every comparison.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Add published values and deviations to `tables`.
    #[arg(long, global = true)]
    pub compare_paper: bool,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Means and cumulative entropies of `X_1..X_n`.
    Tables,
    /// Cdfs of `X_1..X_n` on an even grid.
    Curves,
    /// A transformed law on a grid, with its closed form where known.
    Transform {
        #[arg(long, value_enum)]
        kind: transform::Kind,
        /// Second law for `reversed` and `relevation`.
        #[arg(long)]
        with: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        /// Number of system components.
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Mean, cumulative and differential entropy per member.
    Entropy,
    /// Run a verification battery.
    Verify {
        #[arg(long, value_enum)]
        suite: verify::Suite,
    },
    /// Compare sample estimates with quadrature.
    Mc {
        #[arg(long)]
        samples: Option<usize>,
        /// Sampler for the deepest member.
        #[arg(long, value_enum, default_value = "inverse")]
        method: mc::Method,
        /// Export the sample of the deepest member as CSV.
        #[arg(long)]
        batch_out: Option<PathBuf>,
    },
}

impl Cli {
    pub fn settings(&self) -> Result<Settings, CliError> {
        let families = if self.common.family.is_empty() {
            None
        } else {
            Some(
                self.common
                    .family
                    .iter()
                    .flat_map(|f| f.split(';'))
                    .map(FamilyArg::parse)
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        let flags = Settings {
            families,
            depth: self.common.depth,
            grid: self.common.grid,
            tol: self.common.tol,
            seed: self.common.seed,
            format: self.common.format,
            compare_paper: self.common.compare_paper.then_some(true),
            out: self.common.out.clone(),
            samples: match &self.command {
                Command::Mc { samples, .. } => *samples,
                _ => None,
            },
        };
        Ok(match &self.common.config {
            Some(path) => flags.or(Settings::from_file(path)?),
            None => flags,
        })
    }
}

fn default_families(command: &Command) -> Vec<FamilyArg> {
    match command {
        Command::Mc { .. } | Command::Transform { .. } => vec![FamilyArg::reference('d')],
        _ => all_references(),
    }
}

/// Runs a parsed command, writing its output to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<Status, CliError> {
    let cfg = RunConfig::resolve(cli.settings()?, default_families(&cli.command))?;
    let io_err = |e: io::Error| CliError::Failed(format!("write failed: {e}"));
    match &cli.command {
        Command::Tables | Command::Curves | Command::Entropy | Command::Transform { .. } => {
            let (table, status) = match &cli.command {
                Command::Tables => tables::run(&cfg)?,
                Command::Curves => curves::run(&cfg)?,
                Command::Entropy => entropy::run(&cfg)?,
                Command::Transform { kind, with, theta, m } => {
                    let args = transform::TransformArgs {
                        kind: *kind,
                        with: with.as_deref().map(FamilyArg::parse).transpose()?,
                        theta: *theta,
                        m: *m,
                    };
                    transform::run(&cfg, &args)?
                }
                _ => unreachable!(),
            };
            table.write(cfg.format, out).map_err(io_err)?;
            Ok(status)
        }
        Command::Verify { suite } => {
            let checks = verify::run_suite(*suite, &verify::Options::from_config(&cfg))?;
            for c in &checks {
                match cfg.format {
                    Format::Csv => writeln!(out, "{}", c.line()),
                    Format::Jsonl => writeln!(out, "{}", serde_json::to_string(c).expect("serializable")),
                }
                .map_err(io_err)?;
            }
            Ok(verify::status(&checks))
        }
        Command::Mc { method, batch_out, .. } => {
            let (lines, status) = mc::run(&cfg, *method, batch_out.as_ref())?;
            for l in &lines {
                match cfg.format {
                    Format::Csv => writeln!(out, "{}", l.line()),
                    Format::Jsonl => writeln!(out, "{}", serde_json::to_string(l).expect("serializable")),
                }
                .map_err(io_err)?;
            }
            Ok(status)
        }
    }
}

/// Parses `args`, runs, and returns the process exit code. Output goes to
/// `--out` when given, else to `stdout`; diagnostics go to `stderr`.
pub fn main_with<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            // Help and version requests are not errors.
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = match cli.settings().map(|s| s.out) {
        Ok(Some(path)) => match File::create(&path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let r = run(&cli, &mut w);
                match w.flush() {
                    Ok(()) => r,
                    Err(e) => Err(CliError::Failed(format!("{}: {e}", path.display()))),
                }
            }
            Err(e) => Err(CliError::Usage(format!("cannot create {}: {e}", path.display()))),
        },
        Ok(None) => run(&cli, stdout),
        Err(e) => Err(e),
    };
    match result {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "relevation: {e}");
            e.code()
        }
    }
}
