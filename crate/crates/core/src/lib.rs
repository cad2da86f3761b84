//! Surrogate-data benchmark of a lightly penalized lasso against composite
//! regression.
//!
//! The experiment: a trend-plus-AR(1) target series is predicted either from
//! noisy copies of itself (pseudo-proxies at a chosen signal-to-noise ratio)
//! or from independent AR(1) series of varying persistence. Both a pathwise
//! coordinate-descent lasso (penalty fixed at a fraction of lambda_max) and
//! a composite-mean least-squares baseline are fit on the calibration rows
//! and scored on withheld rows, over a reproducible Monte Carlo grid.
//!
//! Modules:
//! - [`surrogate`]: keyed deterministic streams, target and ensemble generators
//! - [`lasso`]: the coordinate-descent solver with KKT certification
//! - [`baseline`]: composite regression
//! - [`harness`]: holdout schemes, the replication grid, boxplot summaries
//! - [`error`]: shared error type

pub mod baseline;
pub mod error;
pub mod harness;
pub mod lasso;
pub mod surrogate;

pub use baseline::{composite_mean, ols_fit, predict_composite, CompositeFit};
pub use error::{Error, Result};
pub use harness::{
    box_stats, example_fit_trace, rmse, run_grid, run_replication, summarize_cell, BoxStats,
    CellSpec, CellSummary, FitTrace, GridOutput, HoldoutKind, HoldoutScheme, PredictorKind,
    ReplicationResult, RunConfig, TraceKind, TraceRow,
};
pub use lasso::{
    fit_lasso, kkt_check, lambda_max, predict, soft_threshold, standardize, LassoFit, LassoParams,
    StandardizedDesign,
};
pub use surrogate::{
    derive_stream, gen_ar1_ensemble, gen_pseudo_proxies, gen_target, purpose, Ar1EnsembleSpec,
    NormalStream, PredictorMatrix, ProxyEnsembleSpec, StreamKey, TargetSeries, TargetSpec,
};
