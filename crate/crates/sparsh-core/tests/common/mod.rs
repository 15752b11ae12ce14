#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsh_core::{Aggregation, CsrMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random square matrix with about `per_row` off-diagonal entries per row
/// drawn from `[-1, 1)`. When `dominant` is set the diagonal is
/// `1 + Σ|row|` (times a random factor ≥ 1), otherwise it is random too.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, per_row: usize, symmetric: bool, dominant: bool) -> CsrMatrix {
    let mut dense = vec![0.0; n * n];
    for i in 0..n {
        for _ in 0..per_row {
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let v: f64 = rng.gen_range(-1.0..1.0);
            dense[i * n + j] = v;
            if symmetric {
                dense[j * n + i] = v;
            }
        }
    }
    for i in 0..n {
        if dominant {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| dense[i * n + j].abs()).sum();
            let off_col: f64 = (0..n).filter(|&j| j != i).map(|j| dense[j * n + i].abs()).sum();
            dense[i * n + i] = (1.0 + off.max(off_col)) * rng.gen_range(1.0..2.0);
        } else {
            dense[i * n + i] = rng.gen_range(-1.0..1.0);
        }
    }
    CsrMatrix::from_dense(n, n, &dense).unwrap()
}

/// Symmetric, strictly diagonally dominant with positive diagonal, hence SPD.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> CsrMatrix {
    random_matrix(rng, n, per_row, true, true)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random partition of `0..n` into pairs and singletons.
pub fn random_pair_aggregation(rng: &mut ChaCha8Rng, n: usize) -> Aggregation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut f2c = vec![0; n];
    let mut k = 0;
    let mut i = 0;
    while i < n {
        f2c[order[i]] = k;
        if i + 1 < n && rng.gen_bool(0.6) {
            f2c[order[i + 1]] = k;
            i += 1;
        }
        i += 1;
        k += 1;
    }
    Aggregation::new(f2c, k).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `B[perm[i], perm[j]] = A[i, j]`.
pub fn permute_symmetric(a: &CsrMatrix, perm: &[usize]) -> CsrMatrix {
    let t: Vec<_> = a.triplets().map(|(i, j, v)| (perm[i], perm[j], v)).collect();
    CsrMatrix::from_triplets(a.nrows(), a.ncols(), &t).unwrap()
}

pub fn dense_matvec(dense: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..x.len() {
                let v = dense[i * x.len() + j];
                if v != 0.0 {
                    s += v * x[j];
                }
            }
            s
        })
        .collect()
}

pub fn dense_matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    for i in 0..m {
        for l in 0..k {
            let v = a[i * k + l];
            for j in 0..n {
                c[i * n + j] += v * b[l * n + j];
            }
        }
    }
    c
}

pub fn dense_transpose(a: &[f64], m: usize, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            t[j * m + i] = a[i * n + j];
        }
    }
    t
}

/// Dense `Pᵀ A P` with `P[i, agg(i)] = 1`, built without the crate's own
/// prolongation.
pub fn dense_galerkin(a: &CsrMatrix, f2c: &[usize], nc: usize) -> Vec<f64> {
    let n = a.nrows();
    let mut p = vec![0.0; n * nc];
    for (i, &c) in f2c.iter().enumerate() {
        p[i * nc + c] = 1.0;
    }
    let ap = dense_matmul(&a.to_dense(), &p, n, n, nc);
    dense_matmul(&dense_transpose(&p, n, nc), &ap, nc, n, nc)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Off-diagonal coupling used for matching: `max(|a_ij|, |a_ji|)`.
pub fn weight(a: &CsrMatrix, i: usize, j: usize) -> f64 {
    a.get(i, j).abs().max(a.get(j, i).abs())
}

/// Undirected off-diagonal edges with a nonzero weight.
pub fn edges(a: &CsrMatrix) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = a
        .triplets()
        .filter(|&(i, j, v)| i != j && v != 0.0)
        .map(|(i, j, _)| (i.min(j), i.max(j)))
        .collect();
    e.sort_unstable();
    e.dedup();
    e
}
