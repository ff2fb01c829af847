//! Seeded experiment batches, bound curves and CSV output.

mod batch;
mod config;
mod output;

pub use batch::{bounds_only, run_batch, run_seed, BatchResult, BoundCurve, Row, SeedSummary, WORKERS_ENV};
pub use config::{Algorithm, ArmsSpec, CellSpec, Grid, Plan, PolicySpec, Scenario, Seeds, SimConfig};
pub use output::{emit_bound_csv, emit_csv, read_csv, write_bound_csv, write_csv, CSV_HEADER};
