//! Flat `key=value` run configuration. `#` starts a comment.
//!
//! ```text
//! solver=mpcgs
//! problem=synthetic
//! dx=20 dy=10 kappa=10   # several pairs may share a line
//! iters=30
//! out=trace.csv
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const SOLVERS: [&str; 3] = ["mpcgs", "mpscgs", "spfw"];
pub const PROBLEMS: [&str; 2] = ["synthetic", "robust_mc"];
pub const KEYS: [&str; 17] = [
    "solver", "problem", "data", "dim", "dx", "dy", "kappa", "noise", "tau", "lambda", "constants", "iters",
    "seed", "scale", "out", "warm_start", "time_limit",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got `{token}`")]
    Malformed { line: usize, token: String },
    #[error("line {line}: unknown key `{key}` (valid keys: {})", KEYS.join(", "))]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("unknown solver `{0}` (valid solvers: {valid})", valid = SOLVERS.join(", "))]
    UnknownSolver(String),
    #[error("unknown problem `{0}` (valid problems: {valid})", valid = PROBLEMS.join(", "))]
    UnknownProblem(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("kappa must be at least 1, got {0}")]
    KappaBelowOne(f64),
    #[error("problem robust_mc needs a dataset: set `data=<file.libsvm>`")]
    MissingDataPath,
    #[error("dataset file `{0}` does not exist")]
    MissingDataset(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Mpcgs,
    Mpscgs,
    Spfw,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Synthetic {
        dx: usize,
        dy: usize,
        kappa: f64,
        noise: f64,
    },
    RobustMc {
        data: PathBuf,
        dim: Option<usize>,
        tau: f64,
        lambda: Lambda,
        constants: ConstantsSource,
    },
}

/// `λ` as a number or `auto`, which resolves to `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda {
    Auto,
    Value(f64),
}

impl Lambda {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Lambda::Auto => 1.0 / n as f64,
            Lambda::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    Analytic,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub problem: ProblemSpec,
    pub iters: usize,
    pub seed: u64,
    pub scale: f64,
    pub out: PathBuf,
    pub warm_start: bool,
    /// Seconds.
    pub time_limit: Option<f64>,
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

struct Pairs(BTreeMap<String, String>);

impl Pairs {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| invalid(key, v, "not a valid value")),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(key, &v.to_string(), "must be positive and finite"));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let v: usize = self.get(key, default)?;
        if v == 0 {
            return Err(invalid(key, "0", "must be at least 1"));
        }
        Ok(v)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let body = line.split('#').next().unwrap_or("");
            for token in body.split_whitespace() {
                let (key, value) = token.split_once('=').ok_or_else(|| ConfigError::Malformed {
                    line: line_no,
                    token: token.into(),
                })?;
                if !KEYS.contains(&key) {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        key: key.into(),
                    });
                }
                if pairs.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(ConfigError::DuplicateKey {
                        line: line_no,
                        key: key.into(),
                    });
                }
            }
        }
        Self::from_pairs(Pairs(pairs))
    }

    fn from_pairs(p: Pairs) -> Result<Self, ConfigError> {
        let solver = match p.raw("solver").ok_or(ConfigError::MissingKey("solver"))? {
            "mpcgs" => SolverKind::Mpcgs,
            "mpscgs" => SolverKind::Mpscgs,
            "spfw" => SolverKind::Spfw,
            other => return Err(ConfigError::UnknownSolver(other.into())),
        };
        let problem = match p.raw("problem").ok_or(ConfigError::MissingKey("problem"))? {
            "synthetic" => {
                let kappa: f64 = p.get("kappa", 10.0)?;
                if kappa.is_nan() || kappa < 1.0 {
                    return Err(ConfigError::KappaBelowOne(kappa));
                }
                if !kappa.is_finite() {
                    return Err(invalid("kappa", &kappa.to_string(), "must be finite"));
                }
                let noise: f64 = p.get("noise", 0.0)?;
                if !(noise >= 0.0 && noise.is_finite()) {
                    return Err(invalid("noise", &noise.to_string(), "must be non-negative"));
                }
                ProblemSpec::Synthetic {
                    dx: p.count("dx", 20)?,
                    dy: p.count("dy", 10)?,
                    kappa,
                    noise,
                }
            }
            "robust_mc" => {
                let data = PathBuf::from(p.raw("data").ok_or(ConfigError::MissingDataPath)?);
                let lambda = match p.raw("lambda") {
                    None | Some("auto") => Lambda::Auto,
                    Some(_) => Lambda::Value(p.positive("lambda", 1.0)?),
                };
                let constants = match p.raw("constants") {
                    None | Some("estimated") => ConstantsSource::Estimated,
                    Some("analytic") => ConstantsSource::Analytic,
                    Some(v) => return Err(invalid("constants", v, "expected `analytic` or `estimated`")),
                };
                let dim = match p.raw("dim") {
                    None => None,
                    Some(_) => Some(p.count("dim", 1)?),
                };
                ProblemSpec::RobustMc {
                    data,
                    dim,
                    tau: p.positive("tau", 100.0)?,
                    lambda,
                    constants,
                }
            }
            other => return Err(ConfigError::UnknownProblem(other.into())),
        };
        let time_limit = match p.raw("time_limit") {
            None => None,
            Some(_) => Some(p.positive("time_limit", 1.0)?),
        };
        let warm_start = match p.raw("warm_start") {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(v) => return Err(invalid("warm_start", v, "expected true or false")),
        };
        Ok(RunConfig {
            solver,
            problem,
            iters: p.count("iters", 30)?,
            seed: p.get("seed", 0)?,
            scale: p.positive("scale", 1.0)?,
            out: PathBuf::from(p.raw("out").unwrap_or("trace.csv")),
            warm_start,
            time_limit,
        })
    }

    /// Check what can only be checked against the file system.
    pub fn check_files(&self) -> Result<(), ConfigError> {
        if let ProblemSpec::RobustMc { data, .. } = &self.problem {
            if !data.is_file() {
                return Err(ConfigError::MissingDataset(data.clone()));
            }
        }
        Ok(())
    }
}
