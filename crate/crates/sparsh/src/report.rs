//! Text tables and CSV for solve runs, hierarchies and memory plans.

use std::io::{self, Write};

use sparsh_core::execmodel::{MemoryPlan, SchemeComparison};
use sparsh_core::{ConvergenceReport, CsrMatrix, Hierarchy, HierarchyStats};

use crate::config::{coarsening_name, smoother_name, SolverConfig};
use crate::run::SolveOutcome;

pub const CONVERGENCE_CSV_HEADER: &str = "iter,residual_l2,cumulative_seconds";

/// One row per history entry; row 0 is the initial residual.
pub fn write_convergence_csv<W: Write>(report: &ConvergenceReport, w: &mut W) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_CSV_HEADER}")?;
    for (i, (r, t)) in report.residual_history.iter().zip(&report.timestamps).enumerate() {
        writeln!(w, "{i},{r:e},{t:.6}")?;
    }
    Ok(())
}

fn write_levels<W: Write>(w: &mut W, stats: &HierarchyStats) -> io::Result<()> {
    writeln!(w, "{:>5} {:>10} {:>12} {:>7}", "level", "rows", "nnz", "ratio")?;
    let ratios = stats.ratios();
    for (k, (n, nnz)) in stats.levels.iter().enumerate() {
        let ratio = ratios.get(k).map_or_else(|| "-".to_string(), |r| format!("{r:.3}"));
        writeln!(w, "{k:>5} {n:>10} {nnz:>12} {ratio:>7}")?;
    }
    writeln!(w, "operator_complexity {:.4}", stats.operator_complexity)?;
    writeln!(w, "grid_complexity {:.4}", stats.grid_complexity)?;
    if stats.stalled {
        writeln!(w, "stalled yes")?;
    }
    Ok(())
}

pub fn write_run_summary<W: Write>(
    w: &mut W,
    problem: &str,
    a: &CsrMatrix,
    cfg: &SolverConfig,
    out: &SolveOutcome,
) -> io::Result<()> {
    writeln!(w, "problem {problem}")?;
    writeln!(w, "rows {}", a.nrows())?;
    writeln!(w, "nnz {}", a.nnz())?;
    writeln!(w, "solver {}", cfg.solver)?;
    if let Some(stats) = &out.stats {
        writeln!(w, "coarsening {}", coarsening_name(cfg.amg.coarsening))?;
        writeln!(
            w,
            "smoother {} pre {} post {}",
            smoother_name(cfg.amg.smoother),
            cfg.amg.pre_sweeps,
            cfg.amg.post_sweeps
        )?;
        writeln!(w, "levels {}", stats.levels.len())?;
        write_levels(w, stats)?;
    }
    let r = &out.report;
    writeln!(w, "setup_seconds {:.6}", out.setup_seconds)?;
    writeln!(w, "solve_seconds {:.6}", out.solve_seconds)?;
    writeln!(w, "iterations {}", r.iterations)?;
    writeln!(w, "termination {}", r.termination.as_str())?;
    writeln!(w, "final_residual {:e}", r.final_residual())?;
    writeln!(w, "true_residual {:e}", r.true_residual)?;
    Ok(())
}

/// Per-level table with the pair/singleton split of each aggregation.
pub fn write_hierarchy_table<W: Write>(w: &mut W, h: &Hierarchy) -> io::Result<()> {
    let stats = h.stats();
    writeln!(
        w,
        "{:>5} {:>10} {:>12} {:>7} {:>9} {:>10}",
        "level", "rows", "nnz", "ratio", "pairs", "singletons"
    )?;
    for (k, level) in h.levels().iter().enumerate() {
        let (ratio, pairs, singles) = match &level.agg {
            Some(agg) => (
                format!("{:.3}", agg.ratio()),
                (agg.n_coarse() - agg.singleton_count()).to_string(),
                agg.singleton_count().to_string(),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        writeln!(
            w,
            "{k:>5} {:>10} {:>12} {ratio:>7} {pairs:>9} {singles:>10}",
            level.size(),
            level.a.nnz()
        )?;
    }
    writeln!(w, "operator_complexity {:.4}", stats.operator_complexity)?;
    writeln!(w, "grid_complexity {:.4}", stats.grid_complexity)?;
    if stats.stalled {
        writeln!(w, "stalled yes")?;
    }
    Ok(())
}

pub fn write_stats_csv<W: Write>(w: &mut W, stats: &HierarchyStats) -> io::Result<()> {
    writeln!(w, "level,rows,nnz,ratio")?;
    let ratios = stats.ratios();
    for (k, (n, nnz)) in stats.levels.iter().enumerate() {
        match ratios.get(k) {
            Some(r) => writeln!(w, "{k},{n},{nnz},{r}")?,
            None => writeln!(w, "{k},{n},{nnz},")?,
        }
    }
    Ok(())
}

pub const MEMPLAN_CSV_HEADER: &str =
    "scheme,peak_device_bytes,peak_device_matrix_bytes,resident_setup_bytes,per_cycle_transfer_bytes,events";

fn plan_row(p: &MemoryPlan) -> [String; 6] {
    [
        p.scheme.as_str().to_string(),
        p.peak_device_bytes.to_string(),
        p.peak_device_matrix_bytes.to_string(),
        p.resident_setup_bytes.to_string(),
        p.per_cycle_transfer_bytes.to_string(),
        (p.setup_events.len() + p.events.len()).to_string(),
    ]
}

pub fn write_memplan_table<W: Write>(w: &mut W, plans: &[&MemoryPlan]) -> io::Result<()> {
    writeln!(
        w,
        "{:>6} {:>18} {:>18} {:>18} {:>18} {:>7}",
        "scheme", "peak_device", "peak_matrix", "resident_setup", "transfer_per_cycle", "events"
    )?;
    for p in plans {
        let r = plan_row(p);
        writeln!(w, "{:>6} {:>18} {:>18} {:>18} {:>18} {:>7}", r[0], r[1], r[2], r[3], r[4], r[5])?;
    }
    Ok(())
}

pub fn write_ratios<W: Write>(w: &mut W, cmp: &SchemeComparison) -> io::Result<()> {
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
    writeln!(w, "device_ratio_ci_over_mi {}", show(cmp.device_ratio()))?;
    writeln!(w, "transfer_ratio_ci_over_mi {}", show(cmp.transfer_ratio()))
}

pub fn write_memplan_csv<W: Write>(w: &mut W, plans: &[&MemoryPlan]) -> io::Result<()> {
    writeln!(w, "{MEMPLAN_CSV_HEADER}")?;
    for p in plans {
        writeln!(w, "{}", plan_row(p).join(","))?;
    }
    Ok(())
}

pub fn write_events<W: Write>(w: &mut W, plan: &MemoryPlan) -> io::Result<()> {
    writeln!(w, "# {} events", plan.scheme.as_str())?;
    for (phase, events) in [("setup", &plan.setup_events), ("cycle", &plan.events)] {
        for e in events.iter() {
            writeln!(
                w,
                "{phase} {} {} level={} bytes={} repeat={}",
                e.kind.as_str(),
                e.object,
                e.level,
                e.bytes,
                e.repeat
            )?;
        }
    }
    Ok(())
}
