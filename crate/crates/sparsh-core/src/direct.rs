//! Direct solver for the coarsest level.
//!
//! Factorization is split into a symbolic phase (pattern bookkeeping, and for
//! the sparse path a bandwidth-reducing ordering plus the envelope of the
//! factors) and a numeric phase. [`Factorization::refactor`] reruns only the
//! numeric phase for a matrix with identical sparsity.
//!
//! Two kernels back it:
//! * dense LU with partial pivoting, used up to [`DENSE_LIMIT`] unknowns;
//! * envelope (skyline) LU without pivoting after reverse Cuthill–McKee
//!   reordering, used above that. Coarse Galerkin operators of M-matrices
//!   stay diagonally dominant, which is what the unpivoted kernel relies on.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Largest dimension factored with the dense kernel under [`DirectMethod::Auto`].
pub const DENSE_LIMIT: usize = 2000;

/// Relative pivot threshold: `|pivot| < PIVOT_TOL · max|a_ij|` is singular.
pub const PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectMethod {
    #[default]
    Auto,
    Dense,
    Skyline,
}

#[derive(Debug)]
pub struct Factorization {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    symbolic: Symbolic,
    numeric: Numeric,
    symbolic_count: usize,
    numeric_count: usize,
    solve_count: AtomicUsize,
}

#[derive(Debug)]
enum Symbolic {
    Dense,
    Skyline(SkylineSymbolic),
}

#[derive(Debug)]
enum Numeric {
    /// Row-major packed L (unit, strictly lower) and U, with row permutation.
    Dense { lu: Vec<f64>, perm: Vec<usize> },
    Skyline(SkylineNumeric),
}

impl Factorization {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        Self::factor_with(a, DirectMethod::Auto)
    }

    pub fn factor_with(a: &CsrMatrix, method: DirectMethod) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let n = a.nrows();
        let use_dense = match method {
            DirectMethod::Auto => n <= DENSE_LIMIT,
            DirectMethod::Dense => true,
            DirectMethod::Skyline => false,
        };
        let symbolic = if use_dense {
            Symbolic::Dense
        } else {
            Symbolic::Skyline(SkylineSymbolic::analyse(a))
        };
        let numeric = numeric_factor(&symbolic, a)?;
        Ok(Self {
            n,
            row_ptr: a.row_ptr().to_vec(),
            col_idx: a.col_idx().to_vec(),
            symbolic,
            numeric,
            symbolic_count: 1,
            numeric_count: 1,
            solve_count: AtomicUsize::new(0),
        })
    }

    /// Numeric refactorization reusing the symbolic analysis. The pattern of
    /// `a` must match the originally factored matrix.
    pub fn refactor(&mut self, a: &CsrMatrix) -> Result<()> {
        if a.nrows() != self.n
            || a.ncols() != self.n
            || a.row_ptr() != self.row_ptr.as_slice()
            || a.col_idx() != self.col_idx.as_slice()
        {
            return Err(Error::PatternMismatch);
        }
        self.numeric = numeric_factor(&self.symbolic, a)?;
        self.numeric_count += 1;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.symbolic, Symbolic::Dense)
    }

    pub fn symbolic_count(&self) -> usize {
        self.symbolic_count
    }

    pub fn numeric_count(&self) -> usize {
        self.numeric_count
    }

    pub fn solve_count(&self) -> usize {
        self.solve_count.load(Ordering::Relaxed)
    }

    /// Stored factor entries (L and U together).
    pub fn factor_nnz(&self) -> usize {
        match &self.numeric {
            Numeric::Dense { lu, .. } => lu.len(),
            Numeric::Skyline(s) => s.lower.len() + s.upper.len(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x)?;
        Ok(x)
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        if b.len() != self.n || x.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "coarse solve",
                expected: self.n,
                found: if b.len() != self.n { b.len() } else { x.len() },
            });
        }
        match (&self.symbolic, &self.numeric) {
            (Symbolic::Dense, Numeric::Dense { lu, perm }) => dense_solve(self.n, lu, perm, b, x),
            (Symbolic::Skyline(sym), Numeric::Skyline(num)) => num.solve(sym, b, x),
            _ => unreachable!("symbolic and numeric kinds always agree"),
        }
        self.solve_count.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }
}

fn numeric_factor(symbolic: &Symbolic, a: &CsrMatrix) -> Result<Numeric> {
    let tol = PIVOT_TOL * a.max_abs();
    match symbolic {
        Symbolic::Dense => {
            let (lu, perm) = dense_lu(a, tol)?;
            Ok(Numeric::Dense { lu, perm })
        }
        Symbolic::Skyline(sym) => Ok(Numeric::Skyline(SkylineNumeric::factor(sym, a, tol)?)),
    }
}

#[inline]
fn pivot_ok(p: f64, tol: f64) -> bool {
    p.abs() > tol && p != 0.0
}

fn dense_lu(a: &CsrMatrix, tol: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = a.nrows();
    let mut lu = a.to_dense();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for i in k + 1..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !pivot_ok(lu[p * n + k], tol) {
            return Err(Error::SingularPivot {
                row: k,
                pivot: lu[p * n + k],
            });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let l = lu[i * n + k] / pivot;
            lu[i * n + k] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    lu[i * n + j] -= l * lu[k * n + j];
                }
            }
        }
    }
    Ok((lu, perm))
}

fn dense_solve(n: usize, lu: &[f64], perm: &[usize], b: &[f64], x: &mut [f64]) {
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu[i * n + j] * x[j];
        }
        x[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= lu[i * n + j] * x[j];
        }
        x[i] = s / lu[i * n + i];
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrised pattern. `perm[k]` is
/// the original index placed at position `k`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let at = a.transpose();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, slot) in adj.iter_mut().enumerate() {
        let mut nb: Vec<usize> = a
            .row(i)
            .0
            .iter()
            .chain(at.row(i).0)
            .map(|&j| j as usize)
            .filter(|&j| j != i)
            .collect();
        nb.sort_unstable();
        nb.dedup();
        *slot = nb;
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

#[derive(Debug)]
struct SkylineSymbolic {
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    /// first[i]: leftmost column of L row i and topmost row of U column i
    first: Vec<usize>,
    /// offsets into the lower (length i - first[i]) and upper
    /// (length i - first[i] + 1) envelopes
    lower_ptr: Vec<usize>,
    upper_ptr: Vec<usize>,
}

impl SkylineSymbolic {
    fn analyse(a: &CsrMatrix) -> Self {
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv_perm = vec![0usize; n];
        for (k, &i) in perm.iter().enumerate() {
            inv_perm[i] = k;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv_perm[i], inv_perm[j]);
            let (hi, lo) = if pi > pj { (pi, pj) } else { (pj, pi) };
            if lo < first[hi] {
                first[hi] = lo;
            }
        }
        let mut lower_ptr = Vec::with_capacity(n + 1);
        let mut upper_ptr = Vec::with_capacity(n + 1);
        lower_ptr.push(0);
        upper_ptr.push(0);
        for i in 0..n {
            lower_ptr.push(lower_ptr[i] + (i - first[i]));
            upper_ptr.push(upper_ptr[i] + (i - first[i] + 1));
        }
        Self {
            perm,
            inv_perm,
            first,
            lower_ptr,
            upper_ptr,
        }
    }
}

#[derive(Debug)]
struct SkylineNumeric {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SkylineNumeric {
    fn factor(sym: &SkylineSymbolic, a: &CsrMatrix, tol: f64) -> Result<Self> {
        let n = a.nrows();
        let first = &sym.first;
        let mut lower = vec![0.0; sym.lower_ptr[n]];
        let mut upper = vec![0.0; sym.upper_ptr[n]];
        // scatter permuted entries: L(i, c) for c < i, U(r, i) for r <= i
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (sym.inv_perm[i], sym.inv_perm[j]);
            if pj < pi {
                lower[sym.lower_ptr[pi] + pj - first[pi]] += v;
            } else {
                upper[sym.upper_ptr[pj] + pi - first[pj]] += v;
            }
        }
        let l = |lower: &[f64], i: usize, c: usize| lower[sym.lower_ptr[i] + c - first[i]];
        let u = |upper: &[f64], r: usize, c: usize| upper[sym.upper_ptr[c] + r - first[c]];
        for i in 0..n {
            let fi = first[i];
            // row i of L
            for c in fi..i {
                let start = fi.max(first[c]);
                let mut s = l(&lower, i, c);
                for m in start..c {
                    s -= l(&lower, i, m) * u(&upper, m, c);
                }
                lower[sym.lower_ptr[i] + c - fi] = s / u(&upper, c, c);
            }
            // column i of U, diagonal last
            for r in fi..=i {
                let start = fi.max(first[r]);
                let mut s = u(&upper, r, i);
                for m in start..r {
                    s -= l(&lower, r, m) * u(&upper, m, i);
                }
                upper[sym.upper_ptr[i] + r - fi] = s;
            }
            let d = u(&upper, i, i);
            if !pivot_ok(d, tol) {
                return Err(Error::SingularPivot {
                    row: sym.perm[i],
                    pivot: d,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    fn solve(&self, sym: &SkylineSymbolic, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        let first = &sym.first;
        let mut z: Vec<f64> = sym.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let row = &self.lower[sym.lower_ptr[i]..sym.lower_ptr[i + 1]];
            let mut s = z[i];
            for (k, &lv) in row.iter().enumerate() {
                s -= lv * z[first[i] + k];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let col = &self.upper[sym.upper_ptr[i]..sym.upper_ptr[i + 1]];
            let xi = z[i] / col[col.len() - 1];
            z[i] = xi;
            for (k, &uv) in col[..col.len() - 1].iter().enumerate() {
                z[first[i] + k] -= uv * xi;
            }
        }
        for (k, &i) in sym.perm.iter().enumerate() {
            x[i] = z[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::vector::norm2;

    fn coarse_example() -> CsrMatrix {
        CsrMatrix::from_dense(3, 3, &[4.0, 2.0, 0.0, 2.0, 12.0, 1.0, 0.0, 1.0, 12.0]).unwrap()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        for method in [DirectMethod::Dense, DirectMethod::Skyline] {
            let f = Factorization::factor_with(&CsrMatrix::identity(4), method).unwrap();
            assert_eq!(f.solve(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        }
    }

    #[test]
    fn recovers_unit_vector() {
        let a = coarse_example();
        let b = a.spmv(&[1.0, 0.0, 0.0]).unwrap();
        for method in [DirectMethod::Dense, DirectMethod::Skyline] {
            let f = Factorization::factor_with(&a, method).unwrap();
            let x = f.solve(&b).unwrap();
            for (xi, ei) in x.iter().zip([1.0, 0.0, 0.0]) {
                assert!((xi - ei).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_rhs_and_counters() {
        let f = Factorization::factor(&coarse_example()).unwrap();
        assert_eq!(f.solve(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        let x1 = f.solve(&[1.0, 2.0, 3.0]).unwrap();
        let x2 = f.solve(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(f.solve_count(), 3);
        assert_eq!(f.symbolic_count(), 1);
        assert_eq!(f.numeric_count(), 1);
    }

    #[test]
    fn singular_detected() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(Factorization::factor(&a), Err(Error::SingularPivot { row: 1, .. })));
        let z = CsrMatrix::zeros(2, 2);
        assert!(matches!(
            Factorization::factor_with(&z, DirectMethod::Skyline),
            Err(Error::SingularPivot { .. })
        ));
    }

    #[test]
    fn dense_pivots_where_skyline_cannot() {
        let a = CsrMatrix::from_dense(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let f = Factorization::factor_with(&a, DirectMethod::Dense).unwrap();
        assert_eq!(f.solve(&[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn refactor_reuses_symbolic() {
        let a = gallery::poisson2d(6, 5).unwrap();
        let mut f = Factorization::factor_with(&a, DirectMethod::Skyline).unwrap();
        let mut a2 = a.clone();
        for v in a2.values_mut() {
            *v *= 2.0;
        }
        f.refactor(&a2).unwrap();
        assert_eq!((f.symbolic_count(), f.numeric_count()), (1, 2));
        let b = vec![1.0; 30];
        let x = f.solve(&b).unwrap();
        let r = a2.residual(&b, &x).unwrap();
        assert!(norm2(&r) < 1e-12 * norm2(&b));

        let other = gallery::poisson2d(5, 6).unwrap();
        assert_eq!(f.refactor(&other), Err(Error::PatternMismatch));
    }

    #[test]
    fn skyline_matches_dense_on_convection() {
        let a = gallery::convdiff2d(9, 7, 1.0, 100.0, 1.0).unwrap();
        let b: Vec<f64> = (0..63).map(|i| (i as f64 * 0.37).sin()).collect();
        let xd = Factorization::factor_with(&a, DirectMethod::Dense).unwrap().solve(&b).unwrap();
        let xs = Factorization::factor_with(&a, DirectMethod::Skyline).unwrap().solve(&b).unwrap();
        for (p, q) in xd.iter().zip(&xs) {
            assert!((p - q).abs() < 1e-12 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = gallery::poisson2d(7, 4).unwrap();
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..28).collect::<Vec<_>>());
    }
}
