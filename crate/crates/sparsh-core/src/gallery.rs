//! Model problems: 2D finite-difference Poisson and upwind
//! convection–diffusion–reaction on the unit square with Dirichlet
//! boundaries, plus a small 6×6 matrix handy for hand-checked tests.
//!
//! Grid node `(ix, iy)` has index `ix + nx * iy`. Stencils are scaled by
//! `h²` with `h = 1 / (max(nx, ny) + 1)`, so the Laplacian part is always
//! the `[-1, 4, -1]` five-point stencil.

use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Six-node SPD matrix whose heaviest couplings are {0,1}, {2,4}, {3,5}.
pub fn example_6x6() -> CsrMatrix {
    #[rustfmt::skip]
    let dense = [
        4.0, -2.0, 0.0, 0.0, 1.0, 0.0,
        -2.0, 4.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 4.0, 1.0, 2.0, 0.0,
        0.0, 0.0, 1.0, 4.0, 0.0, 2.0,
        1.0, 0.0, 2.0, 0.0, 4.0, 0.0,
        0.0, 0.0, 0.0, 2.0, 0.0, 4.0,
    ];
    CsrMatrix::from_dense(6, 6, &dense).expect("static matrix")
}

/// 5-point Laplacian on an `nx × ny` interior grid.
pub fn poisson2d(nx: usize, ny: usize) -> Result<CsrMatrix> {
    convdiff2d(nx, ny, 0.0, 0.0, 0.0)
}

/// `-Δu + b·∇u + c u` with first-order upwinding of the convection term.
///
/// The result is an M-matrix, weakly row diagonally dominant, and
/// unsymmetric whenever `(bx, by) != (0, 0)`.
pub fn convdiff2d(nx: usize, ny: usize, bx: f64, by: f64, c: f64) -> Result<CsrMatrix> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter("grid dimensions must be at least 2"));
    }
    if !(bx.is_finite() && by.is_finite() && c.is_finite()) {
        return Err(Error::InvalidParameter("coefficients must be finite"));
    }
    let h = 1.0 / (nx.max(ny) as f64 + 1.0);
    let n = nx * ny;
    let west = -1.0 - h * bx.max(0.0);
    let east = -1.0 - h * (-bx).max(0.0);
    let south = -1.0 - h * by.max(0.0);
    let north = -1.0 - h * (-by).max(0.0);
    let diag = 4.0 + h * (bx.abs() + by.abs()) + c * h * h;

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    for iy in 0..ny {
        for ix in 0..nx {
            let k = ix + nx * iy;
            if iy > 0 {
                col_idx.push((k - nx) as u32);
                values.push(south);
            }
            if ix > 0 {
                col_idx.push((k - 1) as u32);
                values.push(west);
            }
            col_idx.push(k as u32);
            values.push(diag);
            if ix + 1 < nx {
                col_idx.push((k + 1) as u32);
                values.push(east);
            }
            if iy + 1 < ny {
                col_idx.push((k + nx) as u32);
                values.push(north);
            }
            row_ptr.push(col_idx.len());
        }
    }
    CsrMatrix::new(n, n, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent dense construction of the 5-point stencil.
    fn dense_laplacian(nx: usize, ny: usize) -> Vec<f64> {
        let n = nx * ny;
        let mut d = alloc::vec![0.0; n * n];
        for iy in 0..ny as i64 {
            for ix in 0..nx as i64 {
                let k = (ix + nx as i64 * iy) as usize;
                d[k * n + k] = 4.0;
                for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let (x, y) = (ix + dx, iy + dy);
                    if x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64 {
                        d[k * n + (x + nx as i64 * y) as usize] = -1.0;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn poisson_3x3_stencil() {
        let a = poisson2d(3, 3).unwrap();
        assert_eq!(a.nrows(), 9);
        assert_eq!(a.to_dense(), dense_laplacian(3, 3));
        assert!(a.diagonal().iter().all(|&d| d == 4.0));
        let row_sums = a.spmv(&[1.0; 9]).unwrap();
        assert_eq!(row_sums[4], 0.0);
    }

    #[test]
    fn poisson_rectangular_matches_oracle() {
        let a = poisson2d(4, 3).unwrap();
        assert_eq!(a.to_dense(), dense_laplacian(4, 3));
        assert_eq!(a.transpose(), a);
    }

    #[test]
    fn convdiff_is_unsymmetric() {
        let a = convdiff2d(8, 8, 1.0, 100.0, 1.0).unwrap();
        assert_ne!(a.transpose(), a);
        assert!(!a.is_symmetric(1e-12));
        // weak diagonal dominance, strict on boundary rows
        for i in 0..a.nrows() {
            let (cols, vals) = a.row(i);
            let off: f64 = cols
                .iter()
                .zip(vals)
                .filter(|(&j, _)| j as usize != i)
                .map(|(_, v)| v.abs())
                .sum();
            assert!(a.get(i, i) >= off);
        }
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(poisson2d(1, 4).is_err());
        assert!(convdiff2d(3, 3, f64::NAN, 0.0, 0.0).is_err());
    }
}
