//! Canned reproductions of the coefficient sweeps (fig2a/b), the closed
//! quadrature runs (fig3a/b) and the driven-damped synchronization runs
//! (fig4a/b), plus truncation convergence scans.
//!
//! Every run returns its files in memory; [`ExperimentOutput::write_to`]
//! puts them on disk. Each CSV header carries the effective configuration,
//! which parses back into the same run.

mod analysis;
mod config;
mod convergence;
mod output;
mod runners;

pub use analysis::{amplitude, dominant_frequency, relative_excursion, relative_gap};
pub use config::{
    reference_file_params, to_file_units, to_internal, ExperimentConfig, ExperimentId, Frame,
    ModeSpec, EXTRA_KEYS,
};
pub use convergence::{
    convergence_scan, convergence_scan_from_config, convergence_scan_with_cap, scaled_dims,
    ConvergenceRow, ConvergenceTable, ScanOptions, CONVERGENCE_TOL, DEFAULT_DIMENSION_CAP,
};
pub use output::{csv_to_jsonlines, write_files, OutputFile};
pub use runners::{
    defaults, fig2_grid, named_observable, resolve, run_evolve, run_experiment, run_fig2, run_fig3,
    run_fig4, Detail, DynamicsRun, ExperimentOutput, CODE_VERSION, EVOLVE_DIMS, FIG3_DIMS,
    FIG4_DIMS, FIG4_SMOKE_DIMS, STEADY_TOL,
};
