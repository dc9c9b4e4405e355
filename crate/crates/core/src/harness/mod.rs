//! Sketch selection, hyperparameter search and the simulation drivers.

mod config;
mod csv;
mod designs;
mod search;
mod simulations;

pub use config::{ExperimentConfig, GridConfig, Sim3Config, DESK_TRAINING_DEGREE, FULL_TRAINING_DEGREE};
pub use csv::{
    format_field_csv, format_results_csv, format_summary_csv, sort_rows, FIELD_HEADER, RESULTS_HEADER,
    SUMMARY_HEADER,
};
pub use designs::DesignLibrary;
pub use search::{
    grid_search, grid_search_centers, grid_search_full, select_sketch, select_sketch_with, GridSpec, KernelFamily, ResultRow, SketchMethod,
};
pub use simulations::{
    error_field, grid_for, run_simulation1, run_simulation2, run_simulation3, write_outputs, ErrorField,
    SimulationOutput,
};
