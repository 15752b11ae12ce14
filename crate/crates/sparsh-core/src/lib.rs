//! Aggregation-based algebraic multigrid.
//!
//! Coarsening pairs unknowns by heavy-edge matching (node-ordered or
//! globally edge-sorted), coarse operators come from the piecewise-constant
//! Galerkin product, and the resulting hierarchy drives a V-cycle that can be
//! used on its own or as a preconditioner for CG and flexible BiCGStab.
//! [`execmodel`] estimates device memory and transfer volume for two hybrid
//! host/device placements of the same cycle.
//!
//! The crate is `no_std` and only needs `alloc`. The `rayon` feature
//! parallelises SpMV and Jacobi sweeps over rows.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod coarsen;
pub mod csr;
pub mod cycle;
pub mod direct;
pub mod error;
pub mod execmodel;
pub mod gallery;
pub mod hierarchy;
pub mod krylov;
pub mod smooth;
pub mod vector;

pub use coarsen::{Aggregation, CoarseningAlgorithm, EdgeList, PWeighting};
pub use csr::CsrMatrix;
pub use cycle::{amg_solve, vcycle, CycleParams};
pub use direct::{DirectMethod, Factorization};
pub use execmodel::{compare_schemes, plan_ci, plan_mi, BytesModel, MemoryPlan, Scheme};
pub use error::{Error, Result};
pub use hierarchy::{setup, AmgConfig, CoarseSolverKind, Hierarchy, HierarchyStats, Level};
pub use krylov::{
    bicgstab, cg, pbicgstab, pcg, Clock, ConvergenceReport, NoClock, Preconditioner, Termination,
};
pub use smooth::{smooth, SmootherKind};
