//! Compressed sparse row storage and the kernels the multigrid cycle needs.

use alloc::vec;
use alloc::vec::Vec;

use crate::coarsen::Aggregation;
use crate::error::{Error, Result};

#[cfg(feature = "rayon")]
const PAR_ROW_THRESHOLD: usize = 4096;

/// Real matrix in CSR form.
///
/// Column indices are strictly increasing within each row, so a matrix never
/// holds two entries for the same position. Explicit zeros are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural
    /// invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if ncols > u32::MAX as usize {
            return Err(Error::InvalidStructure("column count exceeds 32-bit index range"));
        }
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidStructure("row_ptr length must be nrows + 1"));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr[0] must be 0"));
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(Error::InvalidStructure("row_ptr[nrows] must equal nnz"));
        }
        for i in 0..nrows {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            if lo > hi {
                return Err(Error::InvalidStructure("row_ptr must be non-decreasing"));
            }
            let cols = &col_idx[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(
                    "column indices must be strictly increasing within a row",
                ));
            }
            if let Some(&last) = cols.last() {
                if last as usize >= ncols {
                    return Err(Error::IndexOutOfBounds {
                        index: last as usize,
                        bound: ncols,
                    });
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles from (row, col, value) triplets. Duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if ncols > u32::MAX as usize {
            return Err(Error::InvalidStructure("column count exceeds 32-bit index range"));
        }
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows {
                return Err(Error::IndexOutOfBounds { index: i, bound: nrows });
            }
            if j >= ncols {
                return Err(Error::IndexOutOfBounds { index: j, bound: ncols });
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0u32; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            let p = next[i];
            cols[p] = j as u32;
            vals[p] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(u32, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend(
                cols[counts[i]..counts[i + 1]]
                    .iter()
                    .copied()
                    .zip(vals[counts[i]..counts[i + 1]].iter().copied()),
            );
            // stable: duplicates are summed in input order
            scratch.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < scratch.len() {
                let c = scratch[k].0;
                let mut v = scratch[k].1;
                k += 1;
                while k < scratch.len() && scratch[k].0 == c {
                    v += scratch[k].1;
                    k += 1;
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds from a row-major dense array, keeping only nonzero entries.
    pub fn from_dense(nrows: usize, ncols: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                op: "from_dense",
                expected: nrows * ncols,
                found: dense.len(),
            });
        }
        let mut triplets = Vec::new();
        for i in 0..nrows {
            for j in 0..ncols {
                let v = dense[i * ncols + j];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access to the stored values; the pattern stays fixed.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Entry (i, j), zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j as usize, v))
        })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for (i, j, v) in self.triplets() {
            d[i * self.ncols + j] = v;
        }
        d
    }

    /// Diagonal entries; missing ones are reported as zero.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn same_pattern(&self, other: &CsrMatrix) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    pub fn max_abs(&self) -> f64 {
        crate::vector::max_abs(&self.values)
    }

    /// Sum of all stored entries.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// True when |a_ij - a_ji| <= rel_tol * max|a| for every stored entry.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel_tol * self.max_abs();
        self.triplets().all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol)
    }

    /// y = A x.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    /// y = A x, writing into `y`.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                op: "spmv",
                expected: self.ncols,
                found: x.len(),
            });
        }
        if y.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "spmv",
                expected: self.nrows,
                found: y.len(),
            });
        }
        self.spmv_unchecked(x, y);
        Ok(())
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut s = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            s += v * x[j as usize];
        }
        s
    }

    pub(crate) fn spmv_unchecked(&self, x: &[f64], y: &mut [f64]) {
        #[cfg(feature = "rayon")]
        if self.nrows >= PAR_ROW_THRESHOLD {
            use rayon::prelude::*;
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row_dot(i, x));
            return;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
    }

    /// r = f - A x.
    pub fn residual(&self, f: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "residual",
                expected: self.nrows,
                found: f.len(),
            });
        }
        let mut r = self.spmv(x)?;
        for (ri, fi) in r.iter_mut().zip(f) {
            *ri = fi - *ri;
        }
        Ok(r)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let nnz = self.nnz();
        let mut row_ptr = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            row_ptr[j as usize + 1] += 1;
        }
        for j in 0..self.ncols {
            row_ptr[j + 1] += row_ptr[j];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0u32; nnz];
        let mut values = vec![0.0; nnz];
        // rows visited in ascending order keep each output row sorted
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let p = next[j as usize];
                col_idx[p] = i as u32;
                values[p] = v;
                next[j as usize] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Coarse operator `PᵀAP` for the unit prolongation induced by `agg`.
    ///
    /// Each row of P has a single unit entry, so
    /// `(A_c)[k, l] = Σ a_ij` over fine `i` in aggregate `k` and fine `j` in
    /// aggregate `l`. No explicit P or general triple product is formed.
    pub fn galerkin_product(&self, agg: &Aggregation) -> Result<CsrMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        if agg.fine_len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "galerkin_product",
                expected: self.nrows,
                found: agg.fine_len(),
            });
        }
        let nc = agg.n_coarse();
        let map = agg.fine_to_coarse();
        let members = agg.members();

        let mut row_ptr = Vec::with_capacity(nc + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);

        // sparse accumulator: slot[l] is the position of coarse column l in
        // `acc`, or usize::MAX when unused for the current row
        let mut slot = vec![usize::MAX; nc];
        let mut acc: Vec<(u32, f64)> = Vec::new();
        for fine_rows in members {
            acc.clear();
            for &i in fine_rows {
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    let l = map[j as usize];
                    match slot[l] {
                        usize::MAX => {
                            slot[l] = acc.len();
                            acc.push((l as u32, v));
                        }
                        p => acc[p].1 += v,
                    }
                }
            }
            for &(l, _) in &acc {
                slot[l as usize] = usize::MAX;
            }
            acc.sort_unstable_by_key(|&(l, _)| l);
            for &(l, v) in &acc {
                col_idx.push(l);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            nrows: nc,
            ncols: nc,
            row_ptr,
            col_idx,
            values,
        })
    }
}
