//! Host-side companion to `sparsh-core`: Matrix Market I/O, model problem
//! selection, run configuration, timing and report formatting. The
//! `sparsh` binary is a thin layer over these modules.

pub mod config;
pub mod error;
pub mod mtx;
pub mod problem;
pub mod report;
pub mod run;

pub use config::{SolverConfig, SolverKind};
pub use error::AppError;
pub use problem::{build_rhs, ProblemSpec, RhsMode};
pub use run::{solve, SolveOutcome, StdClock};
