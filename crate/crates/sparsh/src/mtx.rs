//! Matrix Market coordinate files (real, general or symmetric).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sparsh_core::CsrMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed Matrix Market header: {0}")]
    Header(String),
    #[error("unsupported Matrix Market field `{0}` (only real is supported)")]
    Field(String),
    #[error("unsupported Matrix Market symmetry `{0}`")]
    Symmetry(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: index ({row}, {col}) outside {nrows}x{ncols} matrix")]
    OutOfBounds {
        line: usize,
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("expected {expected} entries, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] sparsh_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix, MtxError> {
    let file = File::open(path.as_ref())?;
    read_matrix_market_from(BufReader::new(file))
}

/// Parses a coordinate file. Symmetric files are expanded to full storage,
/// duplicate entries are summed.
pub fn read_matrix_market_from<R: BufRead>(reader: R) -> Result<CsrMatrix, MtxError> {
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(MtxError::Header("empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(MtxError::Header(header));
    }
    if tokens[2] != "coordinate" {
        return Err(MtxError::Header(format!("format `{}` is not coordinate", tokens[2])));
    }
    if tokens[3] != "real" {
        return Err(MtxError::Field(tokens[3].clone()));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(MtxError::Symmetry(other.to_string())),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut found = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((nrows, ncols, nnz)) = size else {
            if fields.len() != 3 {
                return Err(MtxError::Parse {
                    line: lineno,
                    msg: "size line must hold rows, columns and entry count".into(),
                });
            }
            let parsed = (
                parse_usize(fields[0], lineno)?,
                parse_usize(fields[1], lineno)?,
                parse_usize(fields[2], lineno)?,
            );
            if symmetry == Symmetry::Symmetric && parsed.0 != parsed.1 {
                return Err(MtxError::Header("symmetric matrix must be square".into()));
            }
            triplets.reserve(if symmetry == Symmetry::Symmetric { 2 * parsed.2 } else { parsed.2 });
            size = Some(parsed);
            continue;
        };
        if fields.len() != 3 {
            return Err(MtxError::Parse {
                line: lineno,
                msg: format!("expected `row col value`, got `{trimmed}`"),
            });
        }
        if found == nnz {
            return Err(MtxError::Parse {
                line: lineno,
                msg: format!("more than the declared {nnz} entries"),
            });
        }
        let row = parse_usize(fields[0], lineno)?;
        let col = parse_usize(fields[1], lineno)?;
        let value: f64 = fields[2].parse().map_err(|_| MtxError::Parse {
            line: lineno,
            msg: format!("invalid real value `{}`", fields[2]),
        })?;
        if row == 0 || col == 0 || row > nrows || col > ncols {
            return Err(MtxError::OutOfBounds {
                line: lineno,
                row,
                col,
                nrows,
                ncols,
            });
        }
        let (i, j) = (row - 1, col - 1);
        triplets.push((i, j, value));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j, i, value));
        }
        found += 1;
    }
    let (nrows, ncols, nnz) = size.ok_or_else(|| MtxError::Header("missing size line".into()))?;
    if found != nnz {
        return Err(MtxError::Truncated {
            expected: nnz,
            found,
        });
    }
    Ok(CsrMatrix::from_triplets(nrows, ncols, &triplets)?)
}

fn parse_usize(s: &str, line: usize) -> Result<usize, MtxError> {
    s.parse().map_err(|_| MtxError::Parse {
        line,
        msg: format!("invalid integer `{s}`"),
    })
}

/// Writes `a` as a general real coordinate file with round-trip exact values.
pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<(), MtxError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    write_matrix_market_to(a, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market_to<W: Write>(a: &CsrMatrix, w: &mut W) -> Result<(), MtxError> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
    }
    Ok(())
}
