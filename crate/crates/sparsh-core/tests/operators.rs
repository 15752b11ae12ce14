mod common;

use common::*;
use proptest::prelude::*;
use sparsh_core::coarsen::{coarsen_edge_hem, coarsen_node_hem, coarsen_node_hem_alternating, EdgeList};
use sparsh_core::{gallery, Aggregation, CoarseningAlgorithm, CsrMatrix, PWeighting};

fn small_matrix() -> impl Strategy<Value = CsrMatrix> {
    (1usize..40, 0usize..5, any::<u64>(), any::<bool>()).prop_map(|(n, per_row, seed, sym)| {
        random_matrix(&mut rng(seed), n, per_row, sym, false)
    })
}

const ALGORITHMS: [CoarseningAlgorithm; 3] = [
    CoarseningAlgorithm::NodeHem,
    CoarseningAlgorithm::NodeHemAlternating,
    CoarseningAlgorithm::EdgeHem,
];

proptest! {
    #[test]
    fn spmv_is_linear(a in small_matrix(), seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let mut r = rng(seed);
        let n = a.nrows();
        let x = random_vec(&mut r, n);
        let y = random_vec(&mut r, n);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| alpha * p + q).collect();
        let lhs = a.spmv(&combo).unwrap();
        let ax = a.spmv(&x).unwrap();
        let ay = a.spmv(&y).unwrap();
        let scale = 1.0 + a.max_abs() * n as f64;
        for i in 0..n {
            prop_assert!((lhs[i] - (alpha * ax[i] + ay[i])).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn spmv_matches_dense(a in small_matrix(), seed in any::<u64>()) {
        let x = random_vec(&mut rng(seed), a.ncols());
        prop_assert_eq!(a.spmv(&x).unwrap(), dense_matvec(&a.to_dense(), a.nrows(), &x));
    }

    #[test]
    fn transpose_is_involution(a in small_matrix()) {
        let t = a.transpose();
        prop_assert_eq!(t.to_dense(), dense_transpose(&a.to_dense(), a.nrows(), a.ncols()));
        prop_assert_eq!(t.transpose(), a);
    }

    #[test]
    fn galerkin_matches_dense_oracle(a in small_matrix(), seed in any::<u64>()) {
        let agg = random_pair_aggregation(&mut rng(seed), a.nrows());
        let ac = a.galerkin_product(&agg).unwrap();
        let oracle = dense_galerkin(&a, agg.fine_to_coarse(), agg.n_coarse());
        for (x, y) in ac.to_dense().iter().zip(&oracle) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        // Unit P preserves the sum of all entries.
        prop_assert!((ac.sum() - a.sum()).abs() <= 1e-10 * (1.0 + a.max_abs() * a.nnz() as f64));
    }

    #[test]
    fn galerkin_equals_explicit_triple_product(a in small_matrix(), seed in any::<u64>()) {
        let agg = random_pair_aggregation(&mut rng(seed), a.nrows());
        let p = agg.prolongation(PWeighting::Unit);
        let n = a.nrows();
        let nc = agg.n_coarse();
        let ap = dense_matmul(&a.to_dense(), &p.to_dense(), n, n, nc);
        let ptap = dense_matmul(&p.transpose().to_dense(), &ap, nc, n, nc);
        let ac = a.galerkin_product(&agg).unwrap().to_dense();
        for (x, y) in ac.iter().zip(&ptap) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn matching_is_valid_and_maximal(a in small_matrix()) {
        let graph_edges = edges(&a);
        for alg in ALGORITHMS {
            let agg = alg.aggregate(&a).unwrap();
            let f2c = agg.fine_to_coarse();
            prop_assert_eq!(f2c.len(), a.nrows());
            for members in agg.members() {
                prop_assert!(!members.is_empty() && members.len() <= 2);
                if let [i, j] = *members {
                    prop_assert!(weight(&a, i, j) > 0.0, "{:?} paired unconnected {} {}", alg, i, j);
                }
            }
            for &(i, j) in &graph_edges {
                let single = |k: usize| agg.aggregate(f2c[k]).len() == 1;
                prop_assert!(!(single(i) && single(j)), "{:?}: adjacent singletons {} {}", alg, i, j);
            }
        }
    }

    #[test]
    fn edge_matching_is_greedy(a in small_matrix()) {
        // Each edge has an endpoint already matched by an edge at least as heavy.
        let agg = coarsen_edge_hem(&a).unwrap();
        let f2c = agg.fine_to_coarse();
        let pair_weight = |k: usize| match *agg.aggregate(f2c[k]) {
            [i, j] => weight(&a, i, j),
            _ => f64::NEG_INFINITY,
        };
        for (i, j) in edges(&a) {
            let w = weight(&a, i, j);
            prop_assert!(pair_weight(i) >= w || pair_weight(j) >= w);
        }
    }

    #[test]
    fn node_matching_pairs_first_node_with_heaviest_neighbour(a in small_matrix()) {
        for agg in [coarsen_node_hem(&a).unwrap(), coarsen_node_hem_alternating(&a).unwrap()] {
            let heaviest = (1..a.nrows()).map(|j| weight(&a, 0, j)).fold(0.0, f64::max);
            if heaviest > 0.0 {
                let group = agg.aggregate(agg.fine_to_coarse()[0]);
                prop_assert_eq!(group.len(), 2);
                let mate = if group[0] == 0 { group[1] } else { group[0] };
                prop_assert_eq!(weight(&a, 0, mate), heaviest);
            }
        }
    }

    #[test]
    fn prolongation_rows_and_columns(a in small_matrix(), seed in any::<u64>()) {
        let agg = random_pair_aggregation(&mut rng(seed), a.nrows());
        let p = agg.prolongation(PWeighting::Unit);
        prop_assert_eq!((p.nrows(), p.ncols()), (a.nrows(), agg.n_coarse()));
        let ones_c = vec![1.0; agg.n_coarse()];
        prop_assert!(p.spmv(&ones_c).unwrap().iter().all(|&v| v == 1.0));
        let col_sums = p.transpose().spmv(&vec![1.0; a.nrows()]).unwrap();
        for (k, s) in col_sums.iter().enumerate() {
            prop_assert_eq!(*s, agg.aggregate(k).len() as f64);
        }
    }

    #[test]
    fn edge_list_sorted(a in small_matrix()) {
        let mut list = EdgeList::from_matrix(&a);
        prop_assert_eq!(list.len(), edges(&a).len());
        list.sort_descending();
        prop_assert!(list.is_sorted_descending());
    }
}

/// Matrix whose off-diagonal weights are all distinct, so edge matching has
/// no ties and must commute with relabelling.
fn distinct_weight_matrix(n: usize, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let base = random_spd(&mut r, n, 3);
    let t: Vec<_> = base
        .triplets()
        .map(|(i, j, v)| {
            if i == j {
                (i, j, v)
            } else {
                let (lo, hi) = (i.min(j), i.max(j));
                (i, j, -(1.0 + (lo * n + hi) as f64 / (n * n) as f64))
            }
        })
        .collect();
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

fn partition(agg: &Aggregation, relabel: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = agg
        .members()
        .map(|m| {
            let mut g: Vec<usize> = m.iter().map(|&i| relabel[i]).collect();
            g.sort_unstable();
            g
        })
        .collect();
    groups.sort();
    groups
}

#[test]
fn edge_matching_equivariant_under_permutation() {
    let a = distinct_weight_matrix(40, 11);
    let identity: Vec<usize> = (0..40).collect();
    let reference = partition(&coarsen_edge_hem(&a).unwrap(), &identity);
    let mut r = rng(5);
    for _ in 0..20 {
        let perm = random_permutation(&mut r, 40);
        let b = permute_symmetric(&a, &perm);
        let mut inverse = vec![0; 40];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        assert_eq!(partition(&coarsen_edge_hem(&b).unwrap(), &inverse), reference);
    }
}

#[test]
fn poisson_coarsening_ratio() {
    for nx in [32, 48, 64] {
        let a = gallery::poisson2d(nx, nx).unwrap();
        for alg in ALGORITHMS {
            let agg = alg.aggregate(&a).unwrap();
            let ratio = agg.ratio();
            assert!((1.6..=2.0).contains(&ratio), "{alg:?} {nx}: {ratio}");
        }
    }
}

#[test]
fn poisson_coarse_operator_stays_symmetric() {
    let a = gallery::poisson2d(20, 17).unwrap();
    let mut current = a;
    for _ in 0..4 {
        let agg = coarsen_node_hem(&current).unwrap();
        current = current.galerkin_product(&agg).unwrap();
        assert!(current.is_symmetric(0.0));
    }
}
