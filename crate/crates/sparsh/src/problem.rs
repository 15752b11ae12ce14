//! Problem selection and right-hand-side construction.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsh_core::{gallery, CsrMatrix};

use crate::error::AppError;
use crate::mtx;

/// Convection velocity and reaction used when `convdiff2d` is given
/// without coefficients.
pub const DEFAULT_CONVECTION: (f64, f64) = (1.0, 100.0);
pub const DEFAULT_REACTION: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Poisson2d { nx: usize, ny: usize },
    ConvDiff2d { nx: usize, ny: usize, bx: f64, by: f64, c: f64 },
    /// The 6×6 hand-checked example matrix.
    Example6,
    File(PathBuf),
}

impl FromStr for ProblemSpec {
    type Err = String;

    /// `poisson2d:NXxNY`, `convdiff2d:NXxNY[:bx,by,c]` or `example6`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or("").to_ascii_lowercase();
        if kind == "example6" {
            return match parts.next() {
                None => Ok(ProblemSpec::Example6),
                Some(_) => Err("example6 takes no arguments".into()),
            };
        }
        let dims = parts.next().ok_or_else(|| format!("missing grid size in `{s}` (e.g. {kind}:64x64)"))?;
        let (nx, ny) = parse_dims(dims)?;
        match kind.as_str() {
            "poisson2d" => match parts.next() {
                None => Ok(ProblemSpec::Poisson2d { nx, ny }),
                Some(_) => Err("poisson2d takes only a grid size".into()),
            },
            "convdiff2d" => {
                let (bx, by, c) = match parts.next() {
                    None => (DEFAULT_CONVECTION.0, DEFAULT_CONVECTION.1, DEFAULT_REACTION),
                    Some(coef) => {
                        let v: Vec<f64> = coef
                            .split(',')
                            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid coefficient `{t}`")))
                            .collect::<Result<_, _>>()?;
                        if v.len() != 3 {
                            return Err("convdiff2d coefficients are bx,by,c".into());
                        }
                        (v[0], v[1], v[2])
                    }
                };
                if parts.next().is_some() {
                    return Err(format!("trailing fields in `{s}`"));
                }
                Ok(ProblemSpec::ConvDiff2d { nx, ny, bx, by, c })
            }
            _ => Err(format!("unknown problem `{kind}` (poisson2d, convdiff2d or example6)")),
        }
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| format!("grid size `{s}` must look like NXxNY"))?;
    let nx: usize = a.parse().map_err(|_| format!("invalid grid size `{s}`"))?;
    let ny: usize = b.parse().map_err(|_| format!("invalid grid size `{s}`"))?;
    if nx < 2 || ny < 2 {
        return Err(format!("grid dimensions must be at least 2, got {nx}x{ny}"));
    }
    Ok((nx, ny))
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Poisson2d { nx, ny } => write!(f, "poisson2d:{nx}x{ny}"),
            ProblemSpec::ConvDiff2d { nx, ny, bx, by, c } => write!(f, "convdiff2d:{nx}x{ny}:{bx},{by},{c}"),
            ProblemSpec::Example6 => f.write_str("example6"),
            ProblemSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl ProblemSpec {
    pub fn build(&self) -> Result<CsrMatrix, AppError> {
        Ok(match self {
            ProblemSpec::Poisson2d { nx, ny } => gallery::poisson2d(*nx, *ny)?,
            ProblemSpec::ConvDiff2d { nx, ny, bx, by, c } => gallery::convdiff2d(*nx, *ny, *bx, *by, *c)?,
            ProblemSpec::Example6 => gallery::example_6x6(),
            ProblemSpec::File(path) => mtx::read_matrix_market(path)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RhsMode {
    #[default]
    Ones,
    /// Uniform on `[-1, 1)` from a seeded ChaCha8 stream.
    Random,
    File(PathBuf),
}

impl FromStr for RhsMode {
    type Err = String;

    /// `ones`, `random` or `file:PATH`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("file", p)) if !p.is_empty() => Ok(RhsMode::File(PathBuf::from(p))),
            _ => match s {
                "ones" => Ok(RhsMode::Ones),
                "random" => Ok(RhsMode::Random),
                _ => Err("expected ones, random or file:PATH".into()),
            },
        }
    }
}

pub fn build_rhs(mode: &RhsMode, n: usize, seed: u64) -> Result<Vec<f64>, AppError> {
    match mode {
        RhsMode::Ones => Ok(vec![1.0; n]),
        RhsMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }
        RhsMode::File(path) => {
            let v = read_vector(path)?;
            if v.len() != n {
                return Err(AppError::Usage(format!(
                    "rhs file {} holds {} values, matrix has {n} rows",
                    path.display(),
                    v.len()
                )));
            }
            Ok(v)
        }
    }
}

/// Whitespace-separated reals. Lines starting with `%` or `#` are skipped;
/// a Matrix Market `array` file is accepted by dropping its size line.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path.display().to_string(), e))?;
    let is_mm_array = text
        .lines()
        .next()
        .is_some_and(|l| l.to_ascii_lowercase().starts_with("%%matrixmarket matrix array"));
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'));
    if is_mm_array {
        lines.next();
    }
    let mut out = Vec::new();
    for tok in lines.flat_map(str::split_whitespace) {
        out.push(
            tok.parse()
                .map_err(|_| AppError::Usage(format!("invalid value `{tok}` in {}", path.display())))?,
        );
    }
    Ok(out)
}
