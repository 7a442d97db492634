//! Scenario-driven front end for `fracdiff-core`.
//!
//! A scenario is a JSON file describing one problem, the solvers to run on
//! it and the checks to apply. See `scenarios/example1.json`.

// NaN must fail the checks, so `!(x >= y)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csv_io;
pub mod error;
pub mod scenario;

pub use commands::{execute, frac_op, ml_values, select_checks, sweep, CheckKind, FracOp, Outputs, Report};
pub use error::{CliError, Result};
pub use scenario::{load, Scenario};

/// Sizes the global thread pool from `FRACDIFF_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("FRACDIFF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::config("FRACDIFF_THREADS", &format!("'{raw}' is not a thread count")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
