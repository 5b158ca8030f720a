//! Run configuration: built from an optional flat `key = value` file, then
//! overridden by command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use relevation::FamilySpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// A starting distribution with the label used in output.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyArg {
    pub label: String,
    pub spec: FamilySpec,
}

impl FamilyArg {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let spec: FamilySpec = s
            .parse()
            .map_err(|e| CliError::Usage(format!("bad family `{s}`: {e}")))?;
        let label = if s.len() == 1 {
            s.to_ascii_lowercase()
        } else {
            spec.to_string()
        };
        Ok(Self { label, spec })
    }

    pub fn reference(letter: char) -> Self {
        Self {
            label: letter.to_string(),
            spec: FamilySpec::reference(letter).expect("reference letter"),
        }
    }

    /// The paper column letter, if this is one of the six reference laws.
    pub fn letter(&self) -> Option<char> {
        FamilySpec::reference_letters()
            .into_iter()
            .find(|&l| FamilySpec::reference(l) == Some(self.spec))
    }
}

pub fn all_references() -> Vec<FamilyArg> {
    FamilySpec::reference_letters()
        .into_iter()
        .map(FamilyArg::reference)
        .collect()
}

/// Values as read from flags or a config file; `None` means unset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub families: Option<Vec<FamilyArg>>,
    pub depth: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub compare_paper: Option<bool>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
}

impl Settings {
    /// Fields set in `self` win over `other`.
    pub fn or(self, other: Settings) -> Settings {
        Settings {
            families: self.families.or(other.families),
            depth: self.depth.or(other.depth),
            grid: self.grid.or(other.grid),
            tol: self.tol.or(other.tol),
            seed: self.seed.or(other.seed),
            format: self.format.or(other.format),
            compare_paper: self.compare_paper.or(other.compare_paper),
            out: self.out.or(other.out),
            samples: self.samples.or(other.samples),
        }
    }

    pub fn from_file(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// Parses lines of `key = value`. Blank lines and lines starting with
    /// `#` are skipped; `family` takes a `;`-separated list.
    pub fn parse(text: &str) -> Result<Settings, CliError> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_ascii_lowercase().replace('_', "-");
            if seen.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        let mut s = Settings::default();
        for (key, value) in seen {
            let bad = |what: &str| CliError::Usage(format!("config key `{key}`: {what}"));
            match key.as_str() {
                "family" => {
                    let list = value
                        .split(';')
                        .filter(|p| !p.trim().is_empty())
                        .map(FamilyArg::parse)
                        .collect::<Result<Vec<_>, _>>()?;
                    s.families = Some(list);
                }
                "depth" => s.depth = Some(value.parse().map_err(|_| bad("not an integer"))?),
                "grid" => s.grid = Some(value.parse().map_err(|_| bad("not an integer"))?),
                "tol" => s.tol = Some(value.parse().map_err(|_| bad("not a number"))?),
                "seed" => s.seed = Some(value.parse().map_err(|_| bad("not an integer"))?),
                "samples" => s.samples = Some(value.parse().map_err(|_| bad("not an integer"))?),
                "format" => {
                    s.format = Some(match value.as_str() {
                        "csv" => Format::Csv,
                        "jsonl" => Format::Jsonl,
                        _ => return Err(bad("expected csv or jsonl")),
                    })
                }
                "compare-paper" => {
                    s.compare_paper = Some(value.parse().map_err(|_| bad("expected true or false"))?)
                }
                "out" => s.out = Some(PathBuf::from(value)),
                _ => return Err(CliError::Usage(format!("unknown config key `{key}`"))),
            }
        }
        Ok(s)
    }
}

/// Settings with defaults filled in and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub families: Vec<FamilyArg>,
    pub depth: Option<usize>,
    pub grid: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub compare_paper: bool,
    pub out: Option<PathBuf>,
    pub samples: usize,
}

pub const DEFAULT_GRID: usize = 100;
pub const DEFAULT_SEED: u64 = 20_090_101;
pub const DEFAULT_SAMPLES: usize = 100_000;

impl RunConfig {
    pub fn resolve(s: Settings, default_families: Vec<FamilyArg>) -> Result<Self, CliError> {
        let cfg = RunConfig {
            families: s.families.unwrap_or(default_families),
            depth: s.depth,
            grid: s.grid.unwrap_or(DEFAULT_GRID),
            tol: s.tol,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            format: s.format.unwrap_or(Format::Csv),
            compare_paper: s.compare_paper.unwrap_or(false),
            out: s.out,
            samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
        };
        if cfg.families.is_empty() {
            return Err(CliError::Usage("no family given".into()));
        }
        if cfg.depth == Some(0) {
            return Err(CliError::Usage("depth must be at least 1".into()));
        }
        if cfg.grid < 16 {
            return Err(CliError::Usage("grid must have at least 16 points".into()));
        }
        if let Some(t) = cfg.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage("tol must be positive".into()));
            }
        }
        if cfg.samples < 2 {
            return Err(CliError::Usage("samples must be at least 2".into()));
        }
        Ok(cfg)
    }

    pub fn depth_or(&self, default: usize) -> usize {
        self.depth.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_flat_file() {
        let s = Settings::parse("# run\nfamily = d; weibull:k=3\ndepth=4\ncompare_paper = true\n\nformat = jsonl\n").unwrap();
        let fam = s.families.unwrap();
        assert_eq!(fam[0].label, "d");
        assert_eq!(fam[1].spec, FamilySpec::Weibull { k: 3.0 });
        assert_eq!(s.depth, Some(4));
        assert_eq!(s.compare_paper, Some(true));
        assert_eq!(s.format, Some(Format::Jsonl));
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::parse("depth = 4\nseed = 9").unwrap();
        let flags = Settings {
            depth: Some(2),
            ..Settings::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.depth, Some(2));
        assert_eq!(merged.seed, Some(9));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::parse("depth 4").is_err());
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("depth = 1\ndepth = 2").is_err());
        let s = Settings {
            grid: Some(8),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(s, all_references()).is_err());
        let s = Settings {
            depth: Some(0),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(s, all_references()).is_err());
    }

    #[test]
    fn letters_round_trip() {
        assert_eq!(FamilyArg::parse("D").unwrap().letter(), Some('d'));
        assert_eq!(FamilyArg::parse("exponential:lambda=1").unwrap().letter(), Some('d'));
        assert_eq!(FamilyArg::parse("exponential:lambda=2").unwrap().letter(), None);
    }
}
