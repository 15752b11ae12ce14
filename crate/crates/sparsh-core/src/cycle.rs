//! Multigrid V-cycle and the stand-alone AMG solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hierarchy::{AmgConfig, CoarseSolver, Hierarchy};
use crate::krylov::{self, Clock, ConvergenceReport, NoClock, Termination};
use crate::smooth::{smooth_in_place, SmootherKind};
use crate::vector::norm2;

/// Residual growth factor (relative to the initial residual) treated as
/// divergence by [`amg_solve`].
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleParams {
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub smoother: SmootherKind,
}

impl Default for CycleParams {
    fn default() -> Self {
        CycleParams::from(&AmgConfig::default())
    }
}

impl From<&AmgConfig> for CycleParams {
    fn from(cfg: &AmgConfig) -> Self {
        Self {
            pre_sweeps: cfg.pre_sweeps,
            post_sweeps: cfg.post_sweeps,
            smoother: cfg.smoother,
        }
    }
}

/// One V-cycle starting at level `k` with right-hand side `f` and initial
/// guess `x`; returns the updated iterate.
///
/// Pre-smooth, restrict the residual, recurse with a zero guess (or solve
/// exactly on the coarsest level), prolongate the correction, post-smooth.
pub fn vcycle(
    h: &Hierarchy,
    k: usize,
    f: &[f64],
    x: &[f64],
    params: &CycleParams,
) -> Result<Vec<f64>> {
    if k >= h.num_levels() {
        return Err(Error::InvalidParameter("level index out of range"));
    }
    params.smoother.validate()?;
    let n = h.level(k).size();
    for (op, len) in [("vcycle: f", f.len()), ("vcycle: x", x.len())] {
        if len != n {
            return Err(Error::DimensionMismatch {
                op,
                expected: n,
                found: len,
            });
        }
    }
    let mut out = x.to_vec();
    cycle_at(h, k, f, &mut out, params)?;
    Ok(out)
}

/// In-place cycle; callers guarantee matching dimensions.
pub(crate) fn cycle_at(
    h: &Hierarchy,
    k: usize,
    f: &[f64],
    x: &mut [f64],
    params: &CycleParams,
) -> Result<()> {
    let level = h.level(k);
    if k + 1 == h.num_levels() {
        return coarse_solve(h, f, x);
    }
    let a = &level.a;
    let n = a.nrows();
    let mut scratch = match params.smoother {
        SmootherKind::WeightedJacobi { .. } => vec![0.0; n],
        _ => Vec::new(),
    };
    smooth_in_place(params.smoother, a, &level.diag, x, f, params.pre_sweeps, &mut scratch);

    let r = a.residual(f, x)?;
    let restriction = level.r.as_ref().expect("non-coarsest level has a restriction");
    let prolongation = level.p.as_ref().expect("non-coarsest level has a prolongation");
    let fc = restriction.spmv(&r)?;
    let mut xc = vec![0.0; fc.len()];
    cycle_at(h, k + 1, &fc, &mut xc, params)?;
    let correction = prolongation.spmv(&xc)?;
    for (xi, ci) in x.iter_mut().zip(&correction) {
        *xi += ci;
    }

    smooth_in_place(params.smoother, a, &level.diag, x, f, params.post_sweeps, &mut scratch);
    Ok(())
}

fn coarse_solve(h: &Hierarchy, f: &[f64], x: &mut [f64]) -> Result<()> {
    match h.coarse_solver() {
        CoarseSolver::Direct(fact) => fact.solve_into(f, x),
        CoarseSolver::Cg { rel_tol, max_iters } => {
            let a = &h.level(h.num_levels() - 1).a;
            let tol = rel_tol * norm2(f);
            let sol = krylov::cg_inner(a, f, tol, *max_iters)?;
            x.copy_from_slice(&sol);
            Ok(())
        }
    }
}

/// Repeated V-cycles from a zero initial guess until `‖b − A x‖₂ < tol`
/// or `max_cycles` cycles have run.
pub fn amg_solve(
    h: &Hierarchy,
    b: &[f64],
    tol: f64,
    max_cycles: usize,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    amg_solve_with_clock(h, b, tol, max_cycles, &NoClock)
}

pub fn amg_solve_with_clock(
    h: &Hierarchy,
    b: &[f64],
    tol: f64,
    max_cycles: usize,
    clock: &dyn Clock,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let params = CycleParams::from(h.config());
    let a = h.finest();
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "amg_solve",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let mut x = vec![0.0; b.len()];
    let r0 = norm2(b);
    let mut report = ConvergenceReport::start(r0, clock);
    let mut res = r0;
    while !(res < tol) && report.iterations < max_cycles {
        cycle_at(h, 0, b, &mut x, &params)?;
        res = norm2(&a.residual(b, &x)?);
        report.push(res, clock);
        if !res.is_finite() || res > DIVERGENCE_FACTOR * r0 {
            return Err(Error::Diverged {
                iteration: report.iterations,
                residual: res,
            });
        }
    }
    report.termination = if res < tol {
        Termination::Converged
    } else {
        Termination::MaxIters
    };
    report.true_residual = res;
    report.finish(clock);
    Ok((x, report))
}
