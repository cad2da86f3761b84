//! Replication harness: runs the predictor-kind x level x holdout grid,
//! fitting both models per replication and summarizing out-of-sample RMSE
//! distributions per cell.
//!
//! Determinism contract: every replication derives its randomness from
//! `(seed, cell_index, replication_index)` alone, results are emitted in
//! `(cell_index, replication_index)` order, and the worker count never
//! changes a single output bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{composite_mean, ols_fit, predict_composite};
use crate::error::{Error, Result};
use crate::lasso::{fit_lasso, predict, LassoParams};
use crate::surrogate::{
    derive_stream, gen_ar1_ensemble, gen_pseudo_proxies, gen_target, purpose, Ar1EnsembleSpec,
    ProxyEnsembleSpec, StreamKey, TargetSpec,
};

/// Which rows are withheld for validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldoutKind {
    /// Test block at the end of the series.
    End,
    /// Test block in the interior, starting at `interior_start` (1-based).
    Interior,
}

impl std::fmt::Display for HoldoutKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HoldoutKind::End => write!(f, "end"),
            HoldoutKind::Interior => write!(f, "interior"),
        }
    }
}

/// A train/test split of a length-`series_length` series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HoldoutScheme {
    pub kind: HoldoutKind,
    pub n_train: usize,
    pub n_test: usize,
    pub series_length: usize,
    /// First withheld index (1-based) for the interior scheme.
    pub interior_start: usize,
}

impl HoldoutScheme {
    pub fn new(
        kind: HoldoutKind,
        series_length: usize,
        n_train: usize,
        interior_start: usize,
    ) -> Result<Self> {
        if n_train < 2 || n_train >= series_length {
            return Err(Error::InvalidParameter(format!(
                "n_train must lie in [2, series_length), got {n_train} of {series_length}"
            )));
        }
        let n_test = series_length - n_train;
        if kind == HoldoutKind::Interior
            && (interior_start < 1 || interior_start + n_test - 1 > series_length)
        {
            return Err(Error::InvalidParameter(format!(
                "interior block {interior_start}..{} falls outside 1..{series_length}",
                interior_start + n_test - 1
            )));
        }
        Ok(Self {
            kind,
            n_train,
            n_test,
            series_length,
            interior_start,
        })
    }

    /// Training row indices (0-based, ascending).
    pub fn train_indices(&self) -> Vec<usize> {
        match self.kind {
            HoldoutKind::End => (0..self.n_train).collect(),
            HoldoutKind::Interior => {
                let test_lo = self.interior_start - 1;
                let test_hi = test_lo + self.n_test;
                (0..self.series_length)
                    .filter(|&t| t < test_lo || t >= test_hi)
                    .collect()
            }
        }
    }

    /// Withheld row indices (0-based, ascending).
    pub fn test_indices(&self) -> Vec<usize> {
        match self.kind {
            HoldoutKind::End => (self.n_train..self.series_length).collect(),
            HoldoutKind::Interior => {
                let lo = self.interior_start - 1;
                (lo..lo + self.n_test).collect()
            }
        }
    }
}

/// The two predictor families of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    PseudoProxy,
    Ar1,
}

impl std::fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PredictorKind::PseudoProxy => write!(f, "pseudo_proxy"),
            PredictorKind::Ar1 => write!(f, "ar1"),
        }
    }
}

/// One experiment cell: a predictor family at one level under one holdout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub predictor_kind: PredictorKind,
    /// SNR for pseudo-proxies, alpha for AR(1) ensembles.
    pub level: f64,
    pub holdout: HoldoutScheme,
    pub cell_index: usize,
}

/// Out-of-sample performance of both models on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub predictor_kind: PredictorKind,
    pub level: f64,
    pub holdout: HoldoutKind,
    pub cell_index: usize,
    pub replication_index: usize,
    pub lasso_rmse: f64,
    pub composite_rmse: f64,
    /// `lasso_rmse / composite_rmse`; NaN if the composite RMSE is zero.
    pub ratio: f64,
    pub lasso_converged: bool,
    pub lasso_nonzero: usize,
}

/// Tukey boxplot statistics: type-7 quartiles, whiskers at the most extreme
/// points within 1.5 IQR of the quartiles, outliers listed ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Boxplot summaries of one cell's replication results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub predictor_kind: PredictorKind,
    pub level: f64,
    pub holdout: HoldoutKind,
    pub cell_index: usize,
    pub n_reps: usize,
    pub lasso_rmse: BoxStats,
    pub composite_rmse: BoxStats,
    pub ratio: BoxStats,
}

/// Full experiment configuration. The defaults reproduce the published
/// grid: a 149-point target (trend 0.25/step, AR coefficient 0.4), 1138
/// predictors, six SNR levels, six alpha levels, 119 training rows, and a
/// lightly penalized lasso at 5% of lambda_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub replications: usize,
    pub series_length: usize,
    pub train_length: usize,
    pub holdout: Vec<HoldoutKind>,
    pub interior_start: usize,
    pub n_predictors: usize,
    pub trend_slope: f64,
    pub target_ar_coef: f64,
    pub snr_levels: Vec<f64>,
    pub ar_levels: Vec<f64>,
    pub lasso: LassoParams,
    /// Worker threads for the replication grid; 0 means one per CPU.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            replications: 1000,
            series_length: 149,
            train_length: 119,
            holdout: vec![HoldoutKind::End],
            interior_start: 60,
            n_predictors: 1138,
            trend_slope: 0.25,
            target_ar_coef: 0.4,
            snr_levels: vec![4.0, 2.0, 1.0, 0.5, 0.25, 0.125],
            ar_levels: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            lasso: LassoParams::default(),
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidParameter("replications must be >= 1".into()));
        }
        if self.holdout.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one holdout scheme is required".into(),
            ));
        }
        if self.snr_levels.is_empty() && self.ar_levels.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one SNR or alpha level is required".into(),
            ));
        }
        if self.snr_levels.iter().any(|&s| s.is_nan() || s <= 0.0) {
            return Err(Error::InvalidParameter("snr levels must be positive".into()));
        }
        if self.ar_levels.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return Err(Error::InvalidParameter(
                "alpha levels must lie in [0, 1]".into(),
            ));
        }
        if self.n_predictors < 1 {
            return Err(Error::InvalidParameter("n_predictors must be >= 1".into()));
        }
        self.target_spec().validate()?;
        self.lasso.validate()?;
        for &kind in &self.holdout {
            self.holdout_scheme(kind)?;
        }
        Ok(())
    }

    pub fn target_spec(&self) -> TargetSpec {
        TargetSpec {
            length: self.series_length,
            trend_slope: self.trend_slope,
            ar_coef: self.target_ar_coef,
            innovation_sd: 1.0,
        }
    }

    pub fn holdout_scheme(&self, kind: HoldoutKind) -> Result<HoldoutScheme> {
        HoldoutScheme::new(kind, self.series_length, self.train_length, self.interior_start)
    }

    /// Enumerate the grid cells in their frozen order: pseudo-proxy cells
    /// first (SNR levels as configured), then AR(1) cells, with the
    /// configured holdout schemes innermost. The position in this order is
    /// the cell index used for substream derivation.
    pub fn cells(&self) -> Result<Vec<CellSpec>> {
        self.validate()?;
        let mut cells = Vec::new();
        let mut push = |kind: PredictorKind, level: f64, holdout: HoldoutScheme, idx: &mut usize| {
            cells.push(CellSpec {
                predictor_kind: kind,
                level,
                holdout,
                cell_index: *idx,
            });
            *idx += 1;
        };
        let mut idx = 0;
        for &snr in &self.snr_levels {
            for &h in &self.holdout {
                push(PredictorKind::PseudoProxy, snr, self.holdout_scheme(h)?, &mut idx);
            }
        }
        for &alpha in &self.ar_levels {
            for &h in &self.holdout {
                push(PredictorKind::Ar1, alpha, self.holdout_scheme(h)?, &mut idx);
            }
        }
        Ok(cells)
    }
}

/// Root mean squared error between predictions and actuals.
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch(format!(
            "rmse over {} predictions vs {} actuals",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::InsufficientData("rmse of empty vectors".into()));
    }
    let sum_sq: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sum_sq / predicted.len() as f64).sqrt())
}

fn select(values: &[f64], indices: &[usize]) -> Vec<f64> {
    indices.iter().map(|&i| values[i]).collect()
}

/// Run one replication of one cell: draw a fresh target and predictor
/// ensemble from the cell/replication substreams, fit both models on the
/// training rows, and score the withheld rows.
pub fn run_replication(
    config: &RunConfig,
    cell: &CellSpec,
    replication_index: usize,
) -> Result<ReplicationResult> {
    run_replication_inner(config, cell, replication_index)
        .map_err(|e| e.in_replication(cell.cell_index, replication_index))
}

fn run_replication_inner(
    config: &RunConfig,
    cell: &CellSpec,
    replication_index: usize,
) -> Result<ReplicationResult> {
    let key = |tag: u64| {
        StreamKey::new(
            config.seed,
            cell.cell_index as u64,
            replication_index as u64,
            tag,
        )
    };
    let mut target_stream = derive_stream(key(purpose::TARGET));
    let target = gen_target(&config.target_spec(), &mut target_stream)?;

    let predictors = match cell.predictor_kind {
        PredictorKind::PseudoProxy => gen_pseudo_proxies(
            &target,
            &ProxyEnsembleSpec {
                n_series: config.n_predictors,
                snr: cell.level,
            },
            &derive_stream(key(purpose::PROXY_NOISE)),
        )?,
        PredictorKind::Ar1 => gen_ar1_ensemble(
            &Ar1EnsembleSpec {
                n_series: config.n_predictors,
                length: config.series_length,
                alpha: cell.level,
                innovation_sd: 1.0,
            },
            &derive_stream(key(purpose::AR1_ENSEMBLE)),
        )?,
    };

    let train = cell.holdout.train_indices();
    let test = cell.holdout.test_indices();
    let x_train = predictors.select_rows(&train)?;
    let x_test = predictors.select_rows(&test)?;
    let y_train = select(target.values(), &train);
    let y_test = select(target.values(), &test);

    let lasso_fit = fit_lasso(&x_train, &y_train, &config.lasso)?;
    let lasso_pred = predict(&lasso_fit, &x_test)?;
    let lasso_rmse = rmse(&lasso_pred, &y_test)?;

    let composite_fit = ols_fit(&composite_mean(&x_train), &y_train)?;
    let composite_pred = predict_composite(&composite_fit, &composite_mean(&x_test));
    let composite_rmse = rmse(&composite_pred, &y_test)?;

    if !lasso_rmse.is_finite() || !composite_rmse.is_finite() {
        return Err(Error::NonFinite("out-of-sample RMSE".into()));
    }
    let ratio = if composite_rmse > 0.0 {
        lasso_rmse / composite_rmse
    } else {
        f64::NAN
    };

    Ok(ReplicationResult {
        predictor_kind: cell.predictor_kind,
        level: cell.level,
        holdout: cell.holdout.kind,
        cell_index: cell.cell_index,
        replication_index,
        lasso_rmse,
        composite_rmse,
        ratio,
        lasso_converged: lasso_fit.converged,
        lasso_nonzero: lasso_fit.n_nonzero,
    })
}

/// Results and summaries of a full grid run, in `(cell_index,
/// replication_index)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutput {
    pub results: Vec<ReplicationResult>,
    pub summaries: Vec<CellSummary>,
}

/// Execute every (cell, replication) pair of the configured grid across a
/// worker pool. Any replication failure aborts the grid, reporting every
/// failed (cell, rep) pair.
pub fn run_grid(config: &RunConfig) -> Result<GridOutput> {
    let cells = config.cells()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;

    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .flat_map(|c| (0..config.replications).map(move |r| (c.cell_index, r)))
        .collect();

    let outcomes: Vec<Result<ReplicationResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, rep)| run_replication(config, &cells[ci], rep))
            .collect()
    });

    let mut results = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(Error::Replication {
                cell_index,
                replication_index,
                source,
            }) => failures.push((cell_index, replication_index, source.to_string())),
            Err(other) => failures.push((usize::MAX, usize::MAX, other.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(Error::GridAborted { failures });
    }

    debug_assert!(results
        .windows(2)
        .all(|w| (w[0].cell_index, w[0].replication_index)
            < (w[1].cell_index, w[1].replication_index)));

    let mut summaries = Vec::with_capacity(cells.len());
    for chunk in results.chunks(config.replications) {
        summaries.push(summarize_cell(chunk)?);
    }
    Ok(GridOutput { results, summaries })
}

/// Boxplot statistics of one cell's results. All results must belong to the
/// same cell. Non-finite ratios (possible only when a composite RMSE is
/// exactly zero) are excluded from the ratio summary.
pub fn summarize_cell(results: &[ReplicationResult]) -> Result<CellSummary> {
    let first = results
        .first()
        .ok_or_else(|| Error::InsufficientData("summarize_cell of zero replications".into()))?;
    if results.iter().any(|r| r.cell_index != first.cell_index) {
        return Err(Error::InvalidParameter(
            "summarize_cell received mixed cells".into(),
        ));
    }
    let collect = |f: fn(&ReplicationResult) -> f64| -> Vec<f64> {
        results.iter().map(f).filter(|v| v.is_finite()).collect()
    };
    Ok(CellSummary {
        predictor_kind: first.predictor_kind,
        level: first.level,
        holdout: first.holdout,
        cell_index: first.cell_index,
        n_reps: results.len(),
        lasso_rmse: box_stats(&collect(|r| r.lasso_rmse))?,
        composite_rmse: box_stats(&collect(|r| r.composite_rmse))?,
        ratio: box_stats(&collect(|r| r.ratio))?,
    })
}

/// Type-7 quantile (linear interpolation between order statistics) of a
/// sorted slice.
fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Tukey boxplot statistics of `values`.
pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData("box_stats of empty sample".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("box_stats input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_type7(&sorted, 0.25);
    let median = quantile_type7(&sorted, 0.5);
    let q3 = quantile_type7(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&v| v >= lo_fence)
        .unwrap_or(q1);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= hi_fence)
        .unwrap_or(q3);
    let outliers: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|&v| v < lo_fence || v > hi_fence)
        .collect();
    Ok(BoxStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}

/// The two illustrative single-replication fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Lasso applied to random-walk predictors (alpha = 1).
    RandomWalkLasso,
    /// Composite regression applied to white-noise predictors (alpha = 0).
    WhiteNoiseComposite,
}

/// One time step of an example-fit trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// 1-based time index.
    pub t: usize,
    pub target: f64,
    pub fitted: f64,
    pub is_validation: bool,
}

/// A full-series fitted trajectory for one example fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub kind: TraceKind,
    pub rows: Vec<TraceRow>,
    /// Nonzero-coefficient count, present for the lasso trace.
    pub lasso_nonzero: Option<usize>,
}

/// Fit one replication of the named example under the end holdout and
/// return its fitted values over the whole series.
pub fn example_fit_trace(kind: TraceKind, seed: u64, config: &RunConfig) -> Result<FitTrace> {
    config.validate()?;
    let holdout = config.holdout_scheme(HoldoutKind::End)?;
    let key = |tag: u64| StreamKey::new(seed, 0, 0, tag);

    let mut target_stream = derive_stream(key(purpose::TARGET));
    let target = gen_target(&config.target_spec(), &mut target_stream)?;

    let alpha = match kind {
        TraceKind::RandomWalkLasso => 1.0,
        TraceKind::WhiteNoiseComposite => 0.0,
    };
    let predictors = gen_ar1_ensemble(
        &Ar1EnsembleSpec {
            n_series: config.n_predictors,
            length: config.series_length,
            alpha,
            innovation_sd: 1.0,
        },
        &derive_stream(key(purpose::AR1_ENSEMBLE)),
    )?;

    let train = holdout.train_indices();
    let x_train = predictors.select_rows(&train)?;
    let y_train = select(target.values(), &train);

    let (fitted, lasso_nonzero) = match kind {
        TraceKind::RandomWalkLasso => {
            let fit = fit_lasso(&x_train, &y_train, &config.lasso)?;
            (predict(&fit, &predictors)?, Some(fit.n_nonzero))
        }
        TraceKind::WhiteNoiseComposite => {
            let fit = ols_fit(&composite_mean(&x_train), &y_train)?;
            (predict_composite(&fit, &composite_mean(&predictors)), None)
        }
    };

    let test = holdout.test_indices();
    let rows = target
        .values()
        .iter()
        .zip(&fitted)
        .enumerate()
        .map(|(t, (&target_v, &fitted_v))| TraceRow {
            t: t + 1,
            target: target_v,
            fitted: fitted_v,
            is_validation: test.binary_search(&t).is_ok(),
        })
        .collect();

    Ok(FitTrace {
        kind,
        rows,
        lasso_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn small_config() -> RunConfig {
        RunConfig {
            seed: 7,
            replications: 3,
            n_predictors: 40,
            snr_levels: vec![1.0],
            ar_levels: vec![],
            ..RunConfig::default()
        }
    }

    #[test]
    fn rmse_examples() {
        let v = vec![1.0, 2.0, 3.0];
        assert_eq!(rmse(&v, &v).unwrap(), 0.0);
        let r = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(r, 12.5_f64.sqrt(), epsilon = 1e-12);
        let shifted: Vec<f64> = v.iter().map(|x| x + 2.5).collect();
        assert_abs_diff_eq!(rmse(&shifted, &v).unwrap(), 2.5, epsilon = 1e-12);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn end_holdout_partitions_the_series() {
        let h = HoldoutScheme::new(HoldoutKind::End, 149, 119, 60).unwrap();
        let train = h.train_indices();
        let test = h.test_indices();
        assert_eq!(train.len(), 119);
        assert_eq!(test.len(), 30);
        assert_eq!(train[0], 0);
        assert_eq!(train[118], 118);
        assert_eq!(test[0], 119);
        assert_eq!(test[29], 148);
    }

    #[test]
    fn interior_holdout_partitions_the_series() {
        let h = HoldoutScheme::new(HoldoutKind::Interior, 149, 119, 60).unwrap();
        let train = h.train_indices();
        let test = h.test_indices();
        assert_eq!(test, (59..89).collect::<Vec<_>>());
        assert_eq!(train.len(), 119);
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..149).collect::<Vec<_>>());
    }

    #[test]
    fn box_stats_on_five_points() {
        let s = box_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.median, 3.0);
        assert_eq!(s.q1, 2.0);
        assert_eq!(s.q3, 4.0);
        assert_eq!(s.whisker_low, 1.0);
        assert_eq!(s.whisker_high, 5.0);
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn box_stats_flags_the_far_point() {
        let s = box_stats(&[1.0, 1.0, 1.0, 1.0, 100.0]).unwrap();
        assert_eq!(s.q1, 1.0);
        assert_eq!(s.q3, 1.0);
        assert_eq!(s.outliers, vec![100.0]);
        assert_eq!(s.whisker_high, 1.0);
    }

    #[test]
    fn whisker_can_sit_inside_box_when_tail_is_all_outliers() {
        // Every point below q1 is beyond the lower fence, so the lower
        // whisker retreats to the smallest in-fence point, above q1.
        let s = box_stats(&[-869.2, -280.0, -252.5, 0.0]).unwrap();
        assert_eq!(s.outliers, vec![-869.2]);
        assert_eq!(s.whisker_low, -280.0);
        assert!(s.whisker_low > s.q1);
    }

    #[test]
    fn box_stats_of_identical_values() {
        let s = box_stats(&[2.0; 8]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (2.0, 2.0, 2.0));
        assert!(s.outliers.is_empty());
        assert_eq!(s.whisker_low, 2.0);
        assert_eq!(s.whisker_high, 2.0);
    }

    #[test]
    fn replication_is_bit_reproducible() {
        let config = small_config();
        let cells = config.cells().unwrap();
        let a = run_replication(&config, &cells[0], 1).unwrap();
        let b = run_replication(&config, &cells[0], 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_proxies_make_composite_exact() {
        let config = RunConfig {
            snr_levels: vec![f64::INFINITY],
            ..small_config()
        };
        let cells = config.cells().unwrap();
        let r = run_replication(&config, &cells[0], 0).unwrap();
        // Composite equals the target itself, so OLS reproduces it exactly.
        assert!(r.composite_rmse <= 1e-8, "composite rmse {}", r.composite_rmse);
        // The lasso sees perfect predictors but keeps its 5% penalty shrink.
        assert!(r.lasso_rmse.is_finite() && r.lasso_rmse < 3.0);
    }

    #[test]
    fn white_noise_composite_tracks_intercept_model() {
        let config = RunConfig {
            replications: 200,
            n_predictors: 200,
            snr_levels: vec![],
            ar_levels: vec![0.0],
            ..small_config()
        };
        let cells = config.cells().unwrap();
        let cell = &cells[0];
        let train = cell.holdout.train_indices();
        let test = cell.holdout.test_indices();
        let mut ratios = Vec::new();
        for rep in 0..config.replications {
            let r = run_replication(&config, cell, rep).unwrap();
            // Oracle: intercept-only prediction on the same draw.
            let mut ts = derive_stream(StreamKey::new(
                config.seed,
                cell.cell_index as u64,
                rep as u64,
                purpose::TARGET,
            ));
            let target = gen_target(&config.target_spec(), &mut ts).unwrap();
            let y_train = select(target.values(), &train);
            let y_test = select(target.values(), &test);
            let y_bar = y_train.iter().sum::<f64>() / y_train.len() as f64;
            let intercept_rmse = rmse(&vec![y_bar; y_test.len()], &y_test).unwrap();
            ratios.push(r.composite_rmse / intercept_rmse);
        }
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        assert!(
            (median - 1.0).abs() < 0.25,
            "median composite/intercept RMSE ratio {median}"
        );
    }

    #[test]
    fn grid_counts_results_and_summaries() {
        let out = run_grid(&small_config()).unwrap();
        assert_eq!(out.results.len(), 3);
        assert_eq!(out.summaries.len(), 1);
        assert_eq!(out.summaries[0].n_reps, 3);
    }

    #[test]
    fn grid_is_worker_count_invariant() {
        let mut config = small_config();
        config.workers = 1;
        let one = run_grid(&config).unwrap();
        config.workers = 8;
        let eight = run_grid(&config).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn grid_ratio_is_paired() {
        let out = run_grid(&small_config()).unwrap();
        for r in &out.results {
            let expected = r.lasso_rmse / r.composite_rmse;
            assert!(
                (r.ratio - expected).abs() <= 1e-12 * expected.abs(),
                "ratio {} vs {}",
                r.ratio,
                expected
            );
        }
    }

    #[test]
    fn cells_enumerate_proxies_before_ar1() {
        let config = RunConfig {
            holdout: vec![HoldoutKind::End, HoldoutKind::Interior],
            ..RunConfig::default()
        };
        let cells = config.cells().unwrap();
        assert_eq!(cells.len(), 24);
        assert_eq!(cells[0].predictor_kind, PredictorKind::PseudoProxy);
        assert_eq!(cells[0].level, 4.0);
        assert_eq!(cells[0].holdout.kind, HoldoutKind::End);
        assert_eq!(cells[1].holdout.kind, HoldoutKind::Interior);
        assert_eq!(cells[12].predictor_kind, PredictorKind::Ar1);
        assert_eq!(cells[12].level, 0.0);
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(c.cell_index, i);
        }
    }

    #[test]
    fn trace_has_expected_shape() {
        let config = RunConfig {
            n_predictors: 60,
            ..RunConfig::default()
        };
        for kind in [TraceKind::RandomWalkLasso, TraceKind::WhiteNoiseComposite] {
            let trace = example_fit_trace(kind, 11, &config).unwrap();
            assert_eq!(trace.rows.len(), 149);
            assert_eq!(trace.rows.iter().filter(|r| r.is_validation).count(), 30);
            assert_eq!(trace.rows[0].t, 1);
            assert_eq!(trace.rows[148].t, 149);
            match kind {
                TraceKind::RandomWalkLasso => {
                    let nnz = trace.lasso_nonzero.unwrap();
                    assert!(nnz > 0 && nnz < 119, "nonzero count {nnz}");
                }
                TraceKind::WhiteNoiseComposite => assert!(trace.lasso_nonzero.is_none()),
            }
        }
    }

    #[test]
    fn trace_is_seed_reproducible() {
        let config = RunConfig {
            n_predictors: 30,
            ..RunConfig::default()
        };
        let a = example_fit_trace(TraceKind::WhiteNoiseComposite, 3, &config).unwrap();
        let b = example_fit_trace(TraceKind::WhiteNoiseComposite, 3, &config).unwrap();
        assert_eq!(a, b);
    }

    // The white-noise composite fit is the intercept model up to sampling
    // noise: the fitted curve's spread over the validation block stays a
    // small fraction of the target's overall spread.
    #[test]
    fn white_noise_trace_validation_predictions_are_flat() {
        let config = RunConfig {
            n_predictors: 100,
            ..RunConfig::default()
        };
        let mut sd_ratios = Vec::new();
        for seed in 0..50 {
            let trace = example_fit_trace(TraceKind::WhiteNoiseComposite, seed, &config).unwrap();
            let val: Vec<f64> = trace
                .rows
                .iter()
                .filter(|r| r.is_validation)
                .map(|r| r.fitted)
                .collect();
            let mean = val.iter().sum::<f64>() / val.len() as f64;
            let sd = (val.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / val.len() as f64)
                .sqrt();
            let y: Vec<f64> = trace.rows.iter().map(|r| r.target).collect();
            let y_mean = y.iter().sum::<f64>() / y.len() as f64;
            let y_sd = (y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>()
                / y.len() as f64)
                .sqrt();
            sd_ratios.push(sd / y_sd);
        }
        sd_ratios.sort_by(f64::total_cmp);
        let median = sd_ratios[sd_ratios.len() / 2];
        assert!(median < 0.25, "median fitted/target sd ratio {median}");
    }

    proptest! {
        #[test]
        fn holdouts_partition_any_valid_series(
            series_length in 10usize..60,
            extra in 2usize..8,
        ) {
            let n_train = series_length - extra.min(series_length / 2);
            let interior_start = 1 + series_length / 4;
            for kind in [HoldoutKind::End, HoldoutKind::Interior] {
                if let Ok(h) = HoldoutScheme::new(kind, series_length, n_train, interior_start) {
                    let train = h.train_indices();
                    let test = h.test_indices();
                    let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
                    all.sort_unstable();
                    prop_assert_eq!(all, (0..series_length).collect::<Vec<_>>());
                    prop_assert_eq!(train.len(), h.n_train);
                    prop_assert_eq!(test.len(), h.n_test);
                }
            }
        }

        #[test]
        fn quartiles_are_ordered(values in proptest::collection::vec(-1e3_f64..1e3, 1..40)) {
            let s = box_stats(&values).unwrap();
            prop_assert!(s.q1 <= s.median);
            prop_assert!(s.median <= s.q3);
            let iqr = s.q3 - s.q1;
            // Whiskers sit at the most extreme points inside the fences, so
            // they stay within the fences but may land inside the box when
            // an entire tail is outliers.
            prop_assert!(s.whisker_low >= s.q1 - 1.5 * iqr - 1e-12);
            prop_assert!(s.whisker_high <= s.q3 + 1.5 * iqr + 1e-12);
            prop_assert!(s.whisker_low <= s.whisker_high);
            for o in &s.outliers {
                prop_assert!(*o < s.q1 - 1.5 * iqr || *o > s.q3 + 1.5 * iqr);
            }
        }
    }
}
