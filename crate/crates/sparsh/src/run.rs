//! Setup and solve dispatch with wall-clock timing.

use std::time::Instant;

use log::{debug, info};
use sparsh_core::krylov::{pbicgstab_with_clock, pcg_with_clock};
use sparsh_core::{
    cycle::amg_solve_with_clock, setup, Clock, ConvergenceReport, CsrMatrix, HierarchyStats, Preconditioner,
};

use crate::config::{SolverConfig, SolverKind};
use crate::error::AppError;

/// Seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn start() -> Self {
        StdClock(Instant::now())
    }
}

impl Clock for StdClock {
    fn elapsed_seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub report: ConvergenceReport,
    /// Present for the AMG-based solvers.
    pub stats: Option<HierarchyStats>,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

pub fn solve(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome, AppError> {
    let setup_clock = StdClock::start();
    let hierarchy = if cfg.solver.uses_amg() {
        let h = setup(a, &cfg.amg)?;
        for (k, (n, nnz)) in h.stats().levels.iter().enumerate() {
            debug!("level {k}: {n} rows, {nnz} nonzeros");
        }
        Some(h)
    } else {
        None
    };
    let setup_seconds = setup_clock.elapsed_seconds();
    if let Some(h) = &hierarchy {
        info!("setup: {} levels in {setup_seconds:.3}s", h.num_levels());
    }

    let clock = StdClock::start();
    let identity = Preconditioner::Identity;
    let amg = hierarchy.as_ref().map(Preconditioner::amg);
    let (x, report) = match (cfg.solver, &hierarchy) {
        (SolverKind::Amg, Some(h)) => amg_solve_with_clock(h, b, cfg.tol, cfg.max_iters, &clock)?,
        (SolverKind::Cg, _) => pcg_with_clock(a, b, &identity, cfg.tol, cfg.max_iters, &clock)?,
        (SolverKind::Pcg, _) => pcg_with_clock(a, b, amg.as_ref().unwrap_or(&identity), cfg.tol, cfg.max_iters, &clock)?,
        (SolverKind::Bicgstab, _) => pbicgstab_with_clock(a, b, &identity, cfg.tol, cfg.max_iters, &clock)?,
        (SolverKind::Pbicgstab, _) => {
            pbicgstab_with_clock(a, b, amg.as_ref().unwrap_or(&identity), cfg.tol, cfg.max_iters, &clock)?
        }
        (SolverKind::Amg, None) => unreachable!("amg always builds a hierarchy"),
    };
    let solve_seconds = report.wall_time;
    info!(
        "{}: {} after {} iterations in {solve_seconds:.3}s, residual {:e}",
        cfg.solver,
        report.termination.as_str(),
        report.iterations,
        report.final_residual()
    );
    Ok(SolveOutcome {
        x,
        report,
        stats: hierarchy.map(|h| h.stats()),
        setup_seconds,
        solve_seconds,
    })
}
