//! Experiment harness: JSON configuration, drivers for each scan, result
//! files, and a self-check suite.

pub mod config;
pub mod output;
pub mod runners;
pub mod validate;

pub use config::{default_tfim_grid, ExperimentConfig, ExperimentKind, ModelPoint, OutputFormat};
pub use output::{render, to_csv, to_json, write_rows, CSV_HEADER};
pub use runners::{
    build_spec, compare, measure, run, run_all_to_all_sweep, run_interconnect_sweep, run_spin1_scan, run_tfim_scan,
    run_xyz_grid, ModelInstance, PointContext, ResultRow, RowStatus, StateMetrics,
};
pub use validate::{run_validation, Check};
