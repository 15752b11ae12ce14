//! Solver settings and the `key = value` config file.
//!
//! File format: one `key = value` per line, `#` starts a comment, blank
//! lines are ignored. Keys match the long command-line flags with `-`
//! replaced by `_`:
//!
//! ```text
//! solver = pcg
//! coarsening = edge_hem
//! smoother = jacobi:0.8
//! pre = 2
//! post = 2
//! coarse_target = 1000
//! max_levels = 6
//! coarse_solver = direct
//! tol = 1e-10
//! max_iters = 500
//! seed = 7
//! threads = 4
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sparsh_core::{AmgConfig, CoarseSolverKind, CoarseningAlgorithm, SmootherKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown setting `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Stand-alone V-cycle iteration.
    Amg,
    Cg,
    #[default]
    Pcg,
    Bicgstab,
    Pbicgstab,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Amg => "amg",
            SolverKind::Cg => "cg",
            SolverKind::Pcg => "pcg",
            SolverKind::Bicgstab => "bicgstab",
            SolverKind::Pbicgstab => "pbicgstab",
        }
    }

    /// Whether a hierarchy has to be built.
    pub fn uses_amg(&self) -> bool {
        matches!(self, SolverKind::Amg | SolverKind::Pcg | SolverKind::Pbicgstab)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match normalize(s).as_str() {
            "amg" => SolverKind::Amg,
            "cg" => SolverKind::Cg,
            "pcg" => SolverKind::Pcg,
            "bicgstab" => SolverKind::Bicgstab,
            "pbicgstab" | "pbicg" => SolverKind::Pbicgstab,
            _ => return Err("expected amg, cg, pcg, bicgstab or pbicgstab".into()),
        })
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('-', "_")
}

pub fn parse_coarsening(s: &str) -> Result<CoarseningAlgorithm, String> {
    Ok(match normalize(s).as_str() {
        "node_hem" => CoarseningAlgorithm::NodeHem,
        "node_hem_alt" | "node_hem_alternating" => CoarseningAlgorithm::NodeHemAlternating,
        "edge_hem" => CoarseningAlgorithm::EdgeHem,
        _ => return Err("expected node_hem, node_hem_alt or edge_hem".into()),
    })
}

pub fn coarsening_name(c: CoarseningAlgorithm) -> &'static str {
    match c {
        CoarseningAlgorithm::NodeHem => "node_hem",
        CoarseningAlgorithm::NodeHemAlternating => "node_hem_alt",
        CoarseningAlgorithm::EdgeHem => "edge_hem",
    }
}

/// `jacobi[:omega]`, `gs_forward` (or `gs`), `gs_backward`, `gs_symmetric`
/// (or `sgs`).
pub fn parse_smoother(s: &str) -> Result<SmootherKind, String> {
    let s = normalize(s);
    let kind = match s.split_once(':') {
        Some(("jacobi", w)) => SmootherKind::WeightedJacobi {
            omega: w.parse().map_err(|_| format!("invalid Jacobi weight `{w}`"))?,
        },
        Some(_) => return Err("only jacobi takes a parameter".into()),
        None => match s.as_str() {
            "jacobi" => SmootherKind::jacobi(),
            "gs" | "gs_forward" => SmootherKind::GaussSeidelForward,
            "gs_backward" => SmootherKind::GaussSeidelBackward,
            "sgs" | "gs_symmetric" => SmootherKind::GaussSeidelSymmetric,
            _ => return Err("expected jacobi[:omega], gs_forward, gs_backward or gs_symmetric".into()),
        },
    };
    kind.validate().map_err(|e| e.to_string())?;
    Ok(kind)
}

pub fn smoother_name(s: SmootherKind) -> String {
    match s {
        SmootherKind::WeightedJacobi { omega } => format!("jacobi:{omega}"),
        SmootherKind::GaussSeidelForward => "gs_forward".into(),
        SmootherKind::GaussSeidelBackward => "gs_backward".into(),
        SmootherKind::GaussSeidelSymmetric => "gs_symmetric".into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub solver: SolverKind,
    pub amg: AmgConfig,
    /// Absolute residual tolerance `‖r‖₂ < tol`.
    pub tol: f64,
    /// Iteration (or cycle) limit.
    pub max_iters: usize,
    pub seed: u64,
    /// Worker threads for data-parallel kernels; `None` leaves the default.
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::default(),
            amg: AmgConfig::default(),
            tol: 1e-8,
            max_iters: 1000,
            seed: 42,
            threads: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "solver",
    "coarsening",
    "smoother",
    "pre",
    "post",
    "coarse_target",
    "max_levels",
    "coarse_solver",
    "tol",
    "max_iters",
    "seed",
    "threads",
];

impl SolverConfig {
    /// Sets one setting from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = normalize(key);
        let value = value.trim();
        let bad = |reason: String| ConfigError::Value {
            key: key.clone(),
            value: value.to_string(),
            reason,
        };
        let count = || value.parse::<usize>().map_err(|e| bad(e.to_string()));
        match key.as_str() {
            "solver" => self.solver = value.parse().map_err(bad)?,
            "coarsening" => self.amg.coarsening = parse_coarsening(value).map_err(bad)?,
            "smoother" => self.amg.smoother = parse_smoother(value).map_err(bad)?,
            "pre" => self.amg.pre_sweeps = count()?,
            "post" => self.amg.post_sweeps = count()?,
            "coarse_target" => {
                let n = count()?;
                if n == 0 {
                    return Err(bad("must be at least 1".into()));
                }
                self.amg.coarse_target = n;
            }
            "max_levels" => {
                let n = count()?;
                if n == 0 {
                    return Err(bad("must be at least 1".into()));
                }
                self.amg.max_levels = n;
            }
            "coarse_solver" => {
                self.amg.coarse_solver = match normalize(value).as_str() {
                    "direct" => CoarseSolverKind::Direct,
                    "cg" => CoarseSolverKind::cg(),
                    _ => return Err(bad("expected direct or cg".into())),
                }
            }
            "tol" => {
                let t: f64 = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(bad("must be positive".into()));
                }
                self.tol = t;
            }
            "max_iters" => self.max_iters = count()?,
            "seed" => self.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "threads" => {
                let n = count()?;
                if n == 0 {
                    return Err(bad("must be at least 1".into()));
                }
                self.threads = Some(n);
            }
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` in order.
    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        self.apply_str(&text)
    }

    /// Defaults, then the optional file, then `overrides` (flag values).
    pub fn resolve<'a>(
        base: SolverConfig,
        file: Option<&Path>,
        overrides: impl IntoIterator<Item = (&'a str, String)>,
    ) -> Result<SolverConfig, ConfigError> {
        let mut cfg = base;
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for (key, value) in overrides {
            cfg.set(key, &value)?;
        }
        Ok(cfg)
    }
}
