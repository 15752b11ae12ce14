//! Conjugate gradient and flexible BiCGStab, each optionally preconditioned
//! by one AMG V-cycle per application.
//!
//! Both methods stop on the recurrence residual `‖r_j‖₂ < tol`; the report
//! also carries the true residual `‖b − A x‖₂` of the returned iterate.

use alloc::vec;
use alloc::vec::Vec;

use crate::csr::CsrMatrix;
use crate::cycle::{cycle_at, CycleParams};
use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::vector::{dot, norm2};

/// Denominators smaller than this in magnitude count as BiCGStab breakdown.
pub const BREAKDOWN_EPS: f64 = 1e-300;

/// Source of elapsed wall time in seconds. The core crate has no clock of
/// its own; std users pass one in.
pub trait Clock {
    fn elapsed_seconds(&self) -> f64;
}

/// Clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    Breakdown,
    Diverged,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::Breakdown => "breakdown",
            Termination::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Residual norm before the first iteration and after each one.
    pub residual_history: Vec<f64>,
    /// Cumulative seconds at which each history entry was recorded.
    pub timestamps: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    /// `‖b − A x‖₂` for the returned iterate.
    pub true_residual: f64,
    pub wall_time: f64,
}

impl ConvergenceReport {
    pub(crate) fn start(r0: f64, clock: &dyn Clock) -> Self {
        Self {
            residual_history: vec![r0],
            timestamps: vec![clock.elapsed_seconds()],
            iterations: 0,
            termination: Termination::MaxIters,
            true_residual: r0,
            wall_time: 0.0,
        }
    }

    pub(crate) fn push(&mut self, residual: f64, clock: &dyn Clock) {
        self.residual_history.push(residual);
        self.timestamps.push(clock.elapsed_seconds());
        self.iterations += 1;
    }

    pub(crate) fn finish(&mut self, clock: &dyn Clock) {
        self.wall_time = clock.elapsed_seconds();
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Approximate inverse applied once per Krylov step.
#[derive(Debug, Clone, Copy)]
pub enum Preconditioner<'h> {
    Identity,
    /// One V-cycle from a zero initial guess.
    AmgVCycle {
        hierarchy: &'h Hierarchy,
        params: CycleParams,
    },
}

impl<'h> Preconditioner<'h> {
    /// V-cycle preconditioner using the cycle settings the hierarchy was
    /// configured with.
    pub fn amg(hierarchy: &'h Hierarchy) -> Self {
        Preconditioner::AmgVCycle {
            hierarchy,
            params: CycleParams::from(hierarchy.config()),
        }
    }

    /// `z = M⁻¹ r`.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        match self {
            Preconditioner::Identity => Ok(r.to_vec()),
            Preconditioner::AmgVCycle { hierarchy, params } => {
                let n = hierarchy.finest().nrows();
                if r.len() != n {
                    return Err(Error::DimensionMismatch {
                        op: "preconditioner",
                        expected: n,
                        found: r.len(),
                    });
                }
                let mut z = vec![0.0; n];
                cycle_at(hierarchy, 0, r, &mut z, params)?;
                Ok(z)
            }
        }
    }
}

fn check_system(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "krylov rhs",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    Ok(())
}

/// Preconditioned conjugate gradient from `x₀ = 0`. `A` should be SPD and
/// `M` symmetric positive definite; neither is verified, but a
/// non-positive `(A p, p)` or `(r, z)` ends the run with
/// [`Termination::Breakdown`].
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    m: &Preconditioner<'_>,
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    pcg_with_clock(a, b, m, tol, max_iters, &NoClock)
}

/// Unpreconditioned CG.
pub fn cg(a: &CsrMatrix, b: &[f64], tol: f64, max_iters: usize) -> Result<(Vec<f64>, ConvergenceReport)> {
    pcg(a, b, &Preconditioner::Identity, tol, max_iters)
}

pub fn pcg_with_clock(
    a: &CsrMatrix,
    b: &[f64],
    m: &Preconditioner<'_>,
    tol: f64,
    max_iters: usize,
    clock: &dyn Clock,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    check_system(a, b, tol)?;
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut report = ConvergenceReport::start(norm2(&r), clock);
    let mut res = report.residual_history[0];
    if res < tol {
        report.termination = Termination::Converged;
        report.finish(clock);
        return Ok((x, report));
    }

    let mut z = m.apply(&r)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut termination = Termination::MaxIters;
    for _ in 0..max_iters {
        if !(rz > 0.0) {
            termination = Termination::Breakdown;
            break;
        }
        a.spmv_into(&p, &mut ap)?;
        let pap = dot(&ap, &p);
        if !(pap > 0.0) {
            termination = Termination::Breakdown;
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
        }
        for i in 0..n {
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r);
        report.push(res, clock);
        if !res.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        if res < tol {
            termination = Termination::Converged;
            break;
        }
        z = m.apply(&r)?;
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_next;
    }
    report.termination = termination;
    report.true_residual = norm2(&a.residual(b, &x)?);
    report.finish(clock);
    Ok((x, report))
}

/// Plain CG returning only the iterate; used as the optional iterative
/// coarse-level solver.
pub(crate) fn cg_inner(a: &CsrMatrix, b: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    if norm2(b) == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let (x, _) = pcg(a, b, &Preconditioner::Identity, tol, max_iters)?;
    Ok(x)
}

/// Flexible preconditioned BiCGStab from `x₀ = 0` with shadow residual
/// `r̄₀ = r₀`.
///
/// The preconditioner is applied to the search direction and to the
/// intermediate residual `s` separately each iteration, so it may differ
/// between applications. Exits early when `‖s‖₂ < tol`.
pub fn pbicgstab(
    a: &CsrMatrix,
    b: &[f64],
    m: &Preconditioner<'_>,
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    pbicgstab_with_clock(a, b, m, tol, max_iters, &NoClock)
}

/// Unpreconditioned BiCGStab.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], tol: f64, max_iters: usize) -> Result<(Vec<f64>, ConvergenceReport)> {
    pbicgstab(a, b, &Preconditioner::Identity, tol, max_iters)
}

pub fn pbicgstab_with_clock(
    a: &CsrMatrix,
    b: &[f64],
    m: &Preconditioner<'_>,
    tol: f64,
    max_iters: usize,
    clock: &dyn Clock,
) -> Result<(Vec<f64>, ConvergenceReport)> {
    check_system(a, b, tol)?;
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let shadow = r.clone();
    let mut p = r.clone();
    let mut report = ConvergenceReport::start(norm2(&r), clock);
    if report.residual_history[0] < tol {
        report.termination = Termination::Converged;
        report.finish(clock);
        return Ok((x, report));
    }

    let mut rho = dot(&r, &shadow);
    let mut ap = vec![0.0; n];
    let mut as_ = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut termination = Termination::MaxIters;
    for _ in 0..max_iters {
        let p_hat = m.apply(&p)?;
        a.spmv_into(&p_hat, &mut ap)?;
        let denom = dot(&ap, &shadow);
        if denom.abs() < BREAKDOWN_EPS {
            termination = Termination::Breakdown;
            break;
        }
        let alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * ap[i];
        }
        let s_norm = norm2(&s);
        if s_norm < tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            report.push(s_norm, clock);
            termination = Termination::Converged;
            break;
        }
        let s_hat = m.apply(&s)?;
        a.spmv_into(&s_hat, &mut as_)?;
        let as_as = dot(&as_, &as_);
        if as_as < BREAKDOWN_EPS {
            termination = Termination::Breakdown;
            break;
        }
        let omega = dot(&as_, &s) / as_as;
        for i in 0..n {
            x[i] = x[i] + alpha * p_hat[i] + omega * s_hat[i];
        }
        for i in 0..n {
            r[i] = s[i] - omega * as_[i];
        }
        let res = norm2(&r);
        report.push(res, clock);
        if !res.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        if res < tol {
            termination = Termination::Converged;
            break;
        }
        if omega == 0.0 {
            termination = Termination::Breakdown;
            break;
        }
        let rho_next = dot(&r, &shadow);
        let beta = (rho_next / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * ap[i]);
        }
        rho = rho_next;
    }
    report.termination = termination;
    report.true_residual = norm2(&a.residual(b, &x)?);
    report.finish(clock);
    Ok((x, report))
}
