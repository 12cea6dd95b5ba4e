//! Config file + flag merging.
//!
//! A config file is a JSON object
//!
//! ```json
//! { "experiment": "chaos-fraction", "seed": 7, "workers": 4,
//!   "output": "out/chaos", "parameters": { "beta": 1.0 } }
//! ```
//!
//! Every key is optional. Flags given on the command line replace the
//! corresponding file keys; anything still missing takes the experiment
//! default.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const WORKERS_ENV: &str = "DRIVENTOP_WORKERS";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUTPUT: &str = "out";

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config file; flags override its keys.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: $DRIVENTOP_WORKERS, else all cores].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    #[serde(alias = "output_path")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
}

pub fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Fully resolved run settings for one experiment.
#[derive(Debug, Clone)]
pub struct Resolved<P> {
    pub params: P,
    pub seed: u64,
    pub workers: usize,
    pub output: PathBuf,
}

pub fn resolve<P, F>(experiment: &str, common: &Common, flags: &F) -> Result<Resolved<P>, CliError>
where
    P: DeserializeOwned + Serialize,
    F: Serialize,
{
    let file = match &common.config {
        Some(path) => read_file(path)?,
        None => FileConfig::default(),
    };
    if let Some(name) = &file.experiment {
        if name != experiment {
            return Err(CliError::Config(format!(
                "config file is for experiment '{name}', not '{experiment}'"
            )));
        }
    }

    let mut merged = file.parameters;
    let overrides = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))?;
    if let Value::Object(map) = overrides {
        for (k, v) in map {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    let given: BTreeSet<String> = merged.keys().cloned().collect();
    let params: P = serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Config(format!("{experiment}: {e}")))?;
    let known: BTreeSet<String> = match serde_json::to_value(&params) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => BTreeSet::new(),
    };
    let unknown: Vec<&String> = given.difference(&known).collect();
    if !unknown.is_empty() {
        return Err(CliError::Config(format!("{experiment}: unknown parameter(s) {unknown:?}")));
    }

    let workers = match common.workers.or(file.workers) {
        Some(n) => n,
        None => workers_from_env()?,
    };
    if workers == 0 {
        return Err(CliError::Config("workers must be >= 1".into()));
    }
    Ok(Resolved {
        params,
        seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        workers,
        output: common
            .output
            .clone()
            .or(file.output)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
    })
}

fn workers_from_env() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={s} is not a worker count"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// `θ:φ` pair on the command line, `[θ, φ]` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

impl From<[f64; 2]> for Angles {
    fn from(a: [f64; 2]) -> Self {
        Self { theta: a[0], phi: a[1] }
    }
}

impl From<Angles> for [f64; 2] {
    fn from(a: Angles) -> Self {
        [a.theta, a.phi]
    }
}

impl FromStr for Angles {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (t, p) = s.split_once(':').ok_or_else(|| format!("expected THETA:PHI, got '{s}'"))?;
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
        Ok(Self { theta: parse(t)?, phi: parse(p)? })
    }
}

/// Accepts either a single number or a list.
pub fn one_or_many<'de, D>(d: D) -> Result<Vec<f64>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match Either::deserialize(d)? {
        Either::One(x) => vec![x],
        Either::Many(v) => v,
    })
}

/// `[lo, hi, n]` with integral `n ≥ 1`.
pub fn range_count(r: &[f64; 3], what: &str) -> Result<usize, CliError> {
    let n = r[2];
    if !(n >= 1.0) || n.fract() != 0.0 {
        return Err(CliError::Config(format!("{what}: point count {n} must be a positive integer")));
    }
    Ok(n as usize)
}

pub fn linear_range(r: &[f64; 3], what: &str) -> Result<Vec<f64>, CliError> {
    let n = range_count(r, what)?;
    if n == 1 {
        return Ok(vec![r[0]]);
    }
    Ok((0..n).map(|k| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64).collect())
}
