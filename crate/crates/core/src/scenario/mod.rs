//! Configuration, the end-to-end pipeline, parameter sweeps and the
//! reference-value table, plus the tagged tables the CLI prints.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod reference;
pub mod sweep;

pub use config::{load_config, save_config, OutputFormat, Protocol, ScenarioConfig};
pub use output::{Cell, Column, Table, DEFAULT_PRECISION};
pub use pipeline::{run_scenario, run_with_mismatch, ScenarioResult, Tagged, RESULT_FIELDS};
pub use reference::{paper_table, reference_table, table_passes, ReferenceRow, Verdict};
pub use sweep::{log_grid, sweep, sweep_table, SweepParameter, SweepRow};
