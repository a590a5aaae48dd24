//! Seeded Monte Carlo trials and parallel sweeps.
//!
//! Trial `i` of a sweep draws all of its data from `derive_seed(base_seed, i)`
//! whatever grid cell it belongs to, so cells share random numbers and
//! results are identical for any worker count.

mod analysis;
mod config;
mod fitting;
mod presets;
mod sweep;
mod trial;

pub use analysis::{
    best_of_gap, compatibility_from_errors, compatibility_score, error_gap, log_log_slope, oracle_gap_series,
    scaling_fit, switching_point_oracle, Compatibility, Metric, OracleGapPoint, SwitchPoint, SEPARABLE_ERROR,
};
pub use config::{
    default_ridge_grid, default_self_train_quantiles, FitSettings, SnrMode, SweepAxis, SweepConfig, TrialConfig,
};
pub use fitting::{fit_methods, margin_thresholds, FitInputs, FittedMethod};
pub use presets::{preset, PRESET_NAMES};
pub use sweep::{run_sweep, run_sweep_with_threads, RunningStats, SweepResult, SweepRow};
pub use trial::{run_trial, trial_seed, MethodMetrics, MethodRecord, TrialResult};
