//! Monte Carlo comparison of models on random piecewise stationary sources.

mod config;
mod plot;
mod report;
mod run;

pub use config::{parse_models, parse_segments, ExperimentConfig, DEFAULT_ROSTER, DEFAULT_SEED};
pub use plot::{panel_ranges, render_svg, write_svg, PanelRange};
pub use report::{ResultRow, ResultTable, CSV_HEADER};
pub use run::{run_experiment, run_trial, trial_seed};
