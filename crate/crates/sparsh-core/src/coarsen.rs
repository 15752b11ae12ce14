//! Pairwise aggregation by heavy-edge matching.
//!
//! Both algorithms treat the matrix as an undirected weighted graph: the
//! weight of edge `{i, j}` is `max(|a_ij|, |a_ji|)`, diagonal entries and
//! stored zeros are ignored. Every aggregate is a matched pair or a singleton
//! (a node left without an unmatched neighbour keeps its own coarse number).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Which matching pass builds the aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoarseningAlgorithm {
    /// Visit nodes in index order, pair each with its heaviest free neighbour.
    #[default]
    NodeHem,
    /// Visit nodes from both ends of the index range alternately.
    NodeHemAlternating,
    /// Sort all edges by weight and pair greedily from the heaviest.
    EdgeHem,
}

impl CoarseningAlgorithm {
    pub fn aggregate(self, a: &CsrMatrix) -> Result<Aggregation> {
        match self {
            CoarseningAlgorithm::NodeHem => coarsen_node_hem(a),
            CoarseningAlgorithm::NodeHemAlternating => coarsen_node_hem_alternating(a),
            CoarseningAlgorithm::EdgeHem => coarsen_edge_hem(a),
        }
    }
}

/// How the nonzeros of P are valued.
///
/// Only piecewise-constant (unit) prolongation is implemented; the enum is
/// the place to add weighted variants such as values taken from a smooth
/// near-null-space vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[non_exhaustive]
pub enum PWeighting {
    #[default]
    Unit,
}

/// Surjection from fine nodes onto coarse nodes, each coarse node owning one
/// or two fine nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregation {
    fine_to_coarse: Vec<usize>,
    n_coarse: usize,
    // members of coarse node k: member_idx[member_ptr[k]..member_ptr[k + 1]],
    // ascending
    member_ptr: Vec<usize>,
    member_idx: Vec<usize>,
}

impl Aggregation {
    pub fn new(fine_to_coarse: Vec<usize>, n_coarse: usize) -> Result<Self> {
        let mut member_ptr = vec![0usize; n_coarse + 1];
        for &c in &fine_to_coarse {
            if c >= n_coarse {
                return Err(Error::IndexOutOfBounds {
                    index: c,
                    bound: n_coarse,
                });
            }
            member_ptr[c + 1] += 1;
        }
        for k in 0..n_coarse {
            let size = member_ptr[k + 1];
            if size == 0 || size > 2 {
                return Err(Error::InvalidParameter(
                    "every aggregate must hold one or two fine nodes",
                ));
            }
            member_ptr[k + 1] += member_ptr[k];
        }
        let mut next = member_ptr.clone();
        let mut member_idx = vec![0usize; fine_to_coarse.len()];
        for (i, &c) in fine_to_coarse.iter().enumerate() {
            member_idx[next[c]] = i;
            next[c] += 1;
        }
        Ok(Self {
            fine_to_coarse,
            n_coarse,
            member_ptr,
            member_idx,
        })
    }

    /// Every node its own aggregate.
    pub fn identity(n: usize) -> Self {
        Self {
            fine_to_coarse: (0..n).collect(),
            n_coarse: n,
            member_ptr: (0..=n).collect(),
            member_idx: (0..n).collect(),
        }
    }

    pub fn fine_to_coarse(&self) -> &[usize] {
        &self.fine_to_coarse
    }

    pub fn fine_len(&self) -> usize {
        self.fine_to_coarse.len()
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    /// Fine nodes of coarse node `k`, ascending.
    pub fn aggregate(&self, k: usize) -> &[usize] {
        &self.member_idx[self.member_ptr[k]..self.member_ptr[k + 1]]
    }

    /// Iterator over the fine-node sets of all coarse nodes in coarse order.
    pub fn members(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        (0..self.n_coarse).map(move |k| self.aggregate(k))
    }

    pub fn singleton_count(&self) -> usize {
        self.members().filter(|m| m.len() == 1).count()
    }

    /// Fine-to-coarse size ratio; 1 for an empty aggregation.
    pub fn ratio(&self) -> f64 {
        if self.n_coarse == 0 {
            1.0
        } else {
            self.fine_len() as f64 / self.n_coarse as f64
        }
    }

    /// The n × n_coarse prolongation with one nonzero per row.
    pub fn prolongation(&self, weighting: PWeighting) -> CsrMatrix {
        let n = self.fine_len();
        let value = match weighting {
            PWeighting::Unit => 1.0,
        };
        CsrMatrix::new(
            n,
            self.n_coarse,
            (0..=n).collect(),
            self.fine_to_coarse.iter().map(|&c| c as u32).collect(),
            vec![value; n],
        )
        .expect("aggregation always yields a valid prolongation")
    }
}

pub fn prolongation_from_aggregation(agg: &Aggregation, weighting: PWeighting) -> CsrMatrix {
    agg.prolongation(weighting)
}

/// Symmetrised off-diagonal graph: row i lists (j, max(|a_ij|, |a_ji|)) for
/// every j != i with a nonzero in either direction, columns ascending.
struct WeightedGraph {
    ptr: Vec<usize>,
    adj: Vec<(usize, f64)>,
}

impl WeightedGraph {
    fn from_matrix(a: &CsrMatrix) -> Self {
        let n = a.nrows();
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * a.nnz());
        for (i, j, v) in a.triplets() {
            if i != j && v != 0.0 {
                entries.push((i, j, v.abs()));
                entries.push((j, i, v.abs()));
            }
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut ptr = vec![0usize; n + 1];
        let mut adj: Vec<(usize, f64)> = Vec::with_capacity(entries.len() / 2 + 1);
        let mut last: Option<(usize, usize)> = None;
        for (i, j, w) in entries {
            if last == Some((i, j)) {
                let e = adj.last_mut().unwrap();
                e.1 = e.1.max(w);
            } else {
                adj.push((j, w));
                ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            ptr[i + 1] += ptr[i];
        }
        Self { ptr, adj }
    }

    fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[self.ptr[i]..self.ptr[i + 1]]
    }
}

fn require_square(a: &CsrMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        })
    }
}

const UNASSIGNED: usize = usize::MAX;

/// Node-based heavy-edge matching in ascending index order.
///
/// Each unassigned node pairs with the unassigned neighbour of largest
/// weight (lowest index on ties); a node with no free neighbour becomes a
/// singleton. Coarse numbers follow discovery order.
pub fn coarsen_node_hem(a: &CsrMatrix) -> Result<Aggregation> {
    require_square(a)?;
    node_hem(a, false)
}

/// Node-based matching that visits the lowest and the highest unassigned
/// index alternately.
pub fn coarsen_node_hem_alternating(a: &CsrMatrix) -> Result<Aggregation> {
    require_square(a)?;
    node_hem(a, true)
}

fn node_hem(a: &CsrMatrix, alternate: bool) -> Result<Aggregation> {
    let n = a.nrows();
    let graph = WeightedGraph::from_matrix(a);
    let mut map = vec![UNASSIGNED; n];
    let mut next = 0usize;
    // [lo, hi) brackets every unassigned node
    let (mut lo, mut hi) = (0usize, n);
    let mut from_low = true;
    loop {
        while lo < hi && map[lo] != UNASSIGNED {
            lo += 1;
        }
        while hi > lo && map[hi - 1] != UNASSIGNED {
            hi -= 1;
        }
        if lo >= hi {
            break;
        }
        let i = if from_low { lo } else { hi - 1 };
        if alternate {
            from_low = !from_low;
        }
        if let Some(j) = heaviest_free_neighbour(&graph, &map, i) {
            map[j] = next;
        }
        map[i] = next;
        next += 1;
    }
    Aggregation::new(map, next)
}

fn heaviest_free_neighbour(graph: &WeightedGraph, map: &[usize], i: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(j, w) in graph.neighbours(i) {
        if map[j] != UNASSIGNED {
            continue;
        }
        // neighbours are ascending, so strict > keeps the lowest index on ties
        match best {
            Some((_, bw)) if w <= bw => {}
            _ => best = Some((j, w)),
        }
    }
    best.map(|(j, _)| j)
}

/// Candidate edges `(weight, i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList(Vec<(f64, usize, usize)>);

impl EdgeList {
    pub fn from_matrix(a: &CsrMatrix) -> Self {
        let graph = WeightedGraph::from_matrix(a);
        let mut edges = Vec::with_capacity(graph.adj.len() / 2);
        for i in 0..a.nrows() {
            for &(j, w) in graph.neighbours(i) {
                if i < j {
                    edges.push((w, i, j));
                }
            }
        }
        EdgeList(edges)
    }

    /// Lexicographically descending by (weight, i, j).
    pub fn sort_descending(&mut self) {
        self.0.sort_unstable_by(|x, y| cmp_edge(y, x));
    }

    pub fn is_sorted_descending(&self) -> bool {
        self.0
            .windows(2)
            .all(|w| cmp_edge(&w[0], &w[1]) != Ordering::Less)
    }

    pub fn edges(&self) -> &[(f64, usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn cmp_edge(x: &(f64, usize, usize), y: &(f64, usize, usize)) -> Ordering {
    x.0.total_cmp(&y.0)
        .then(x.1.cmp(&y.1))
        .then(x.2.cmp(&y.2))
}

/// Edge-based heavy-edge matching.
///
/// Edges are processed heaviest first and matched when both endpoints are
/// free; leftover nodes become singletons in ascending order after all pairs.
pub fn coarsen_edge_hem(a: &CsrMatrix) -> Result<Aggregation> {
    require_square(a)?;
    let n = a.nrows();
    let mut edges = EdgeList::from_matrix(a);
    edges.sort_descending();

    let mut map = vec![UNASSIGNED; n];
    let mut next = 0usize;
    for &(_, i, j) in edges.edges() {
        if map[i] == UNASSIGNED && map[j] == UNASSIGNED {
            map[i] = next;
            map[j] = next;
            next += 1;
        }
    }
    for c in map.iter_mut() {
        if *c == UNASSIGNED {
            *c = next;
            next += 1;
        }
    }
    Aggregation::new(map, next)
}
