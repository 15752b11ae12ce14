//! Stationary relaxation used for pre- and post-smoothing.

use alloc::vec;
use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SmootherKind {
    /// `x ← x + ω D⁻¹ (f − A x)`, with `0 < ω ≤ 1`.
    WeightedJacobi { omega: f64 },
    GaussSeidelForward,
    GaussSeidelBackward,
    /// A forward sweep followed by a backward sweep; counts as one sweep.
    #[default]
    GaussSeidelSymmetric,
}


impl SmootherKind {
    pub const DEFAULT_JACOBI_OMEGA: f64 = 2.0 / 3.0;

    pub fn jacobi() -> Self {
        SmootherKind::WeightedJacobi {
            omega: Self::DEFAULT_JACOBI_OMEGA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SmootherKind::WeightedJacobi { omega } if !(omega > 0.0 && omega <= 1.0) => Err(
                Error::InvalidParameter("Jacobi weight must lie in (0, 1]"),
            ),
            _ => Ok(()),
        }
    }
}

/// Diagonal of `a`, failing on the first zero (or missing) entry.
pub fn checked_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let d = a.diagonal();
    if let Some(row) = d.iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroDiagonal { row });
    }
    Ok(d)
}

/// Applies `sweeps` sweeps of `kind` to `x` and returns the result.
pub fn smooth(
    kind: SmootherKind,
    a: &CsrMatrix,
    x: &[f64],
    f: &[f64],
    sweeps: usize,
) -> Result<Vec<f64>> {
    kind.validate()?;
    let diag = checked_diagonal(a)?;
    for (op, len) in [("smooth: x", x.len()), ("smooth: f", f.len())] {
        if len != a.nrows() {
            return Err(Error::DimensionMismatch {
                op,
                expected: a.nrows(),
                found: len,
            });
        }
    }
    let mut out = x.to_vec();
    let mut scratch = vec![0.0; if matches!(kind, SmootherKind::WeightedJacobi { .. }) { a.nrows() } else { 0 }];
    smooth_in_place(kind, a, &diag, &mut out, f, sweeps, &mut scratch);
    Ok(out)
}

/// In-place sweeps with a precomputed nonzero diagonal. `scratch` must have
/// length `n` for Jacobi and is unused otherwise.
pub(crate) fn smooth_in_place(
    kind: SmootherKind,
    a: &CsrMatrix,
    diag: &[f64],
    x: &mut [f64],
    f: &[f64],
    sweeps: usize,
    scratch: &mut [f64],
) {
    for _ in 0..sweeps {
        match kind {
            SmootherKind::WeightedJacobi { omega } => jacobi_sweep(a, diag, omega, x, f, scratch),
            SmootherKind::GaussSeidelForward => gs_row(a, diag, x, f, 0..a.nrows()),
            SmootherKind::GaussSeidelBackward => gs_row(a, diag, x, f, (0..a.nrows()).rev()),
            SmootherKind::GaussSeidelSymmetric => {
                gs_row(a, diag, x, f, 0..a.nrows());
                gs_row(a, diag, x, f, (0..a.nrows()).rev());
            }
        }
    }
}

fn jacobi_sweep(
    a: &CsrMatrix,
    diag: &[f64],
    omega: f64,
    x: &mut [f64],
    f: &[f64],
    ax: &mut [f64],
) {
    a.spmv_unchecked(x, ax);
    for i in 0..x.len() {
        x[i] += omega * (f[i] - ax[i]) / diag[i];
    }
}

#[inline]
fn gs_row(
    a: &CsrMatrix,
    diag: &[f64],
    x: &mut [f64],
    f: &[f64],
    rows: impl Iterator<Item = usize>,
) {
    for i in rows {
        let (cols, vals) = a.row(i);
        let mut s = f[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j as usize != i {
                s -= v * x[j as usize];
            }
        }
        x[i] = s / diag[i];
    }
}
