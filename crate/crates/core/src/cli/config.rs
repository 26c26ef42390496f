//! Run configuration: command-line flags merged over an optional
//! `key = value` file. Flags win over the file; the tolerance falls back
//! to `KCAYLEY_TOL` and then to the default profile.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::ToleranceProfile;

/// Keys accepted in a config file.
pub const CONFIG_KEYS: &[&str] = &[
    "model", "t1", "t2", "mu", "t", "delta", "L", "N", "seed", "tol", "format", "out", "grid", "margin",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Domain(format!("unknown format `{other}`; expected json or csv"))),
        }
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct ModelArgs {
    /// Model name: ssh, kitaev or circle.
    #[arg(long)]
    pub model: Option<String>,
    /// SSH intra-cell hopping.
    #[arg(long)]
    pub t1: Option<f64>,
    /// SSH inter-cell hopping.
    #[arg(long)]
    pub t2: Option<f64>,
    /// Kitaev chemical potential.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Kitaev hopping.
    #[arg(long = "t")]
    pub t: Option<f64>,
    /// Kitaev pairing.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of cells of the open chain.
    #[arg(long = "L")]
    pub cells: Option<usize>,
    /// Momentum samples, or the circle truncation for `product`.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Seed for randomized suites.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Equality tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated parameter values for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Fraction of the gap excluded at the band edges.
    #[arg(long)]
    pub margin: Option<f64>,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Resolved configuration, echoed verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: Option<String>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub mu: Option<f64>,
    pub t: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "L")]
    pub cells: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub seed: u64,
    pub tol: ToleranceProfile,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub grid: Option<Vec<f64>>,
    pub margin: Option<f64>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Domain(format!("config key `{key}`: cannot parse `{v}`")))
}

/// Parses `key = value` lines; `#` starts a comment. Unknown and repeated
/// keys are errors.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("config line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !CONFIG_KEYS.contains(&k) {
            return Err(Error::Domain(format!("config line {}: unknown key `{k}`", lineno + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Domain(format!("config line {}: key `{k}` repeated", lineno + 1)));
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Merge `args` over the parsed file entries and the environment
    /// tolerance.
    pub fn resolve(args: &ModelArgs, file: &BTreeMap<String, String>, env_tol: Option<&str>) -> Result<RunConfig> {
        fn pick<T: FromStr + Clone>(flag: &Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
            match (flag, file.get(key)) {
                (Some(v), _) => Ok(Some(v.clone())),
                (None, Some(s)) => parse(key, s).map(Some),
                (None, None) => Ok(None),
            }
        }
        let grid = match (&args.grid, file.get("grid")) {
            (Some(g), _) => Some(g.clone()),
            (None, Some(s)) => Some(
                s.split(',')
                    .map(|x| parse::<f64>("grid", x.trim()))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, None) => None,
        };
        let env = match env_tol {
            Some(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("KCAYLEY_TOL: cannot parse `{s}`")))?,
            ),
            None => None,
        };
        let tol = match pick(&args.tol, file, "tol")?.or(env) {
            Some(eq) => ToleranceProfile::default().with_eq_tol(eq)?,
            None => ToleranceProfile::default(),
        };
        let margin = pick(&args.margin, file, "margin")?;
        if let Some(m) = margin {
            if !(0.0..1.0).contains(&m) {
                return Err(Error::Domain(format!("margin must lie in [0, 1), got {m}")));
            }
        }
        let cfg = RunConfig {
            model: pick(&args.model, file, "model")?,
            t1: pick(&args.t1, file, "t1")?,
            t2: pick(&args.t2, file, "t2")?,
            mu: pick(&args.mu, file, "mu")?,
            t: pick(&args.t, file, "t")?,
            delta: pick(&args.delta, file, "delta")?,
            cells: pick(&args.cells, file, "L")?,
            n: pick(&args.n, file, "N")?,
            seed: pick(&args.seed, file, "seed")?.unwrap_or(0),
            tol,
            format: pick(&args.format, file, "format")?.unwrap_or_default(),
            out: pick(&args.out, file, "out")?,
            grid,
            margin,
        };
        for (name, v) in [("t1", cfg.t1), ("t2", cfg.t2), ("mu", cfg.mu), ("t", cfg.t), ("delta", cfg.delta)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("{name} must be finite")));
            }
        }
        if cfg.grid.as_ref().is_some_and(|g| g.is_empty() || g.iter().any(|x| !x.is_finite())) {
            return Err(Error::Domain("grid must list finite values".into()));
        }
        Ok(cfg)
    }
}
