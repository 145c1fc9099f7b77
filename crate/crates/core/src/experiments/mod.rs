//! False-negative-rate study of the Waterfall on random networks, and the
//! exhaustive small-network sweep.

mod exhaustive;
mod grid;

pub use exhaustive::{run_exhaustive_smalln, ExhaustiveCase, ExhaustiveOptions, ExhaustiveReport};
pub use grid::{run_fnr_grid, CellError, ExperimentConfig, FnrReport, FnrRow, FnrSummary, WORKERS_ENV};

use crate::error::{Error, Result};

/// Worker count from `NETINFER_WORKERS`, if set to a positive integer.
fn workers_override() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}
