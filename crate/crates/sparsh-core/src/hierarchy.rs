//! Setup phase: the multilevel operator hierarchy and its statistics.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::coarsen::{Aggregation, CoarseningAlgorithm, PWeighting};
use crate::csr::CsrMatrix;
use crate::direct::{DirectMethod, Factorization};
use crate::error::{Error, Result};
use crate::smooth::{checked_diagonal, SmootherKind};

/// How the coarsest system is solved inside a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CoarseSolverKind {
    /// LU factorization computed once at setup; each cycle only substitutes.
    #[default]
    Direct,
    /// Unpreconditioned CG to a relative residual of `rel_tol`.
    Cg { rel_tol: f64, max_iters: usize },
}

impl CoarseSolverKind {
    pub fn cg() -> Self {
        CoarseSolverKind::Cg {
            rel_tol: 1e-10,
            max_iters: 10_000,
        }
    }
}

/// Tunables for hierarchy construction and the cycle built on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmgConfig {
    pub coarsening: CoarseningAlgorithm,
    pub weighting: PWeighting,
    pub smoother: SmootherKind,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    /// Stop coarsening once a level has at most this many unknowns.
    pub coarse_target: usize,
    /// Upper bound on the number of levels, finest included.
    pub max_levels: usize,
    pub coarse_solver: CoarseSolverKind,
    pub direct_method: DirectMethod,
}

impl Default for AmgConfig {
    fn default() -> Self {
        Self {
            coarsening: CoarseningAlgorithm::NodeHem,
            weighting: PWeighting::Unit,
            smoother: SmootherKind::GaussSeidelSymmetric,
            pre_sweeps: 6,
            post_sweeps: 6,
            coarse_target: 500,
            max_levels: 10,
            coarse_solver: CoarseSolverKind::Direct,
            direct_method: DirectMethod::Auto,
        }
    }
}

impl AmgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_levels < 1 {
            return Err(Error::InvalidParameter("max_levels must be at least 1"));
        }
        if self.coarse_target < 1 {
            return Err(Error::InvalidParameter("coarse_target must be at least 1"));
        }
        if let CoarseSolverKind::Cg { rel_tol, .. } = self.coarse_solver {
            if !(rel_tol > 0.0) {
                return Err(Error::InvalidParameter("coarse CG tolerance must be positive"));
            }
        }
        self.smoother.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub a: CsrMatrix,
    /// Prolongation to this level from the next coarser one; `None` on the
    /// coarsest level.
    pub p: Option<CsrMatrix>,
    /// Restriction, the transpose of `p`.
    pub r: Option<CsrMatrix>,
    pub agg: Option<Aggregation>,
    /// Diagonal of `a`, kept for the smoother (empty on the coarsest level).
    pub(crate) diag: Vec<f64>,
}

impl Level {
    pub fn size(&self) -> usize {
        self.a.nrows()
    }
}

#[derive(Debug)]
pub(crate) enum CoarseSolver {
    Direct(Box<Factorization>),
    Cg { rel_tol: f64, max_iters: usize },
}

/// Levels `A_0 … A_{L-1}` with their transfer operators and the coarsest
/// solver. Immutable once built.
#[derive(Debug)]
pub struct Hierarchy {
    levels: Vec<Level>,
    coarse: CoarseSolver,
    config: AmgConfig,
    stalled: bool,
}

/// Per-level sizes and complexities.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyStats {
    /// `(rows, nnz)` per level, finest first.
    pub levels: Vec<(usize, usize)>,
    /// `Σ nnz(A_i) / nnz(A_0)`.
    pub operator_complexity: f64,
    /// `Σ n_i / n_0`.
    pub grid_complexity: f64,
    /// Coarsening stopped because a level produced no pairs while still
    /// above the coarse target.
    pub stalled: bool,
    /// Entries stored by the coarse factorization, 0 for the CG coarse solver.
    pub coarse_factor_nnz: usize,
}

impl HierarchyStats {
    /// `n_i / n_{i+1}` for each coarsening step.
    pub fn ratios(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| w[0].0 as f64 / w[1].0 as f64)
            .collect()
    }
}

/// Builds the hierarchy for `a`.
///
/// Coarsening repeats until a level has at most `coarse_target` rows, the
/// level count reaches `max_levels`, or a pass finds no pairs. The last
/// level is then factored (or handed to CG).
pub fn setup(a: &CsrMatrix, cfg: &AmgConfig) -> Result<Hierarchy> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let mut levels = Vec::new();
    let mut current = a.clone();
    let mut stalled = false;
    loop {
        let n = current.nrows();
        if n <= cfg.coarse_target || levels.len() + 1 >= cfg.max_levels {
            break;
        }
        let agg = cfg.coarsening.aggregate(&current)?;
        if agg.n_coarse() == n {
            stalled = true;
            break;
        }
        let coarse = current.galerkin_product(&agg)?;
        let p = agg.prolongation(cfg.weighting);
        let r = p.transpose();
        let diag = checked_diagonal(&current)?;
        levels.push(Level {
            a: current,
            p: Some(p),
            r: Some(r),
            agg: Some(agg),
            diag,
        });
        current = coarse;
    }

    let coarse = match cfg.coarse_solver {
        CoarseSolverKind::Direct => {
            CoarseSolver::Direct(Box::new(Factorization::factor_with(&current, cfg.direct_method)?))
        }
        CoarseSolverKind::Cg { rel_tol, max_iters } => CoarseSolver::Cg { rel_tol, max_iters },
    };
    levels.push(Level {
        a: current,
        p: None,
        r: None,
        agg: None,
        diag: Vec::new(),
    });
    Ok(Hierarchy {
        levels,
        coarse,
        config: *cfg,
        stalled,
    })
}

impl Hierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k]
    }

    pub fn finest(&self) -> &CsrMatrix {
        &self.levels[0].a
    }

    pub fn config(&self) -> &AmgConfig {
        &self.config
    }

    pub fn stalled(&self) -> bool {
        self.stalled
    }

    /// The coarse LU, when the direct coarse solver is in use.
    pub fn coarse_factorization(&self) -> Option<&Factorization> {
        match &self.coarse {
            CoarseSolver::Direct(f) => Some(f),
            CoarseSolver::Cg { .. } => None,
        }
    }

    pub(crate) fn coarse_solver(&self) -> &CoarseSolver {
        &self.coarse
    }

    pub fn stats(&self) -> HierarchyStats {
        let levels: Vec<(usize, usize)> =
            self.levels.iter().map(|l| (l.a.nrows(), l.a.nnz())).collect();
        let (n0, nnz0) = levels[0];
        let total_n: usize = levels.iter().map(|l| l.0).sum();
        let total_nnz: usize = levels.iter().map(|l| l.1).sum();
        let ratio = |total: usize, base: usize| {
            if base == 0 {
                1.0
            } else {
                total as f64 / base as f64
            }
        };
        HierarchyStats {
            operator_complexity: ratio(total_nnz, nnz0),
            grid_complexity: ratio(total_n, n0),
            levels,
            stalled: self.stalled,
            coarse_factor_nnz: self.coarse_factorization().map_or(0, Factorization::factor_nnz),
        }
    }
}
