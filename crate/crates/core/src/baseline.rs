//! Composite regression: average every predictor series into one composite,
//! then simple least squares of the target on that composite.

use crate::error::{Error, Result};
use crate::surrogate::PredictorMatrix;

/// A fitted composite regression. `degenerate` marks the intercept-only
/// fallback used when the composite is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeFit {
    pub intercept: f64,
    pub slope: f64,
    pub train_r2: f64,
    pub degenerate: bool,
}

/// Row-wise arithmetic mean across all predictor columns.
pub fn composite_mean(x: &PredictorMatrix) -> Vec<f64> {
    let mut out = vec![0.0; x.n_rows()];
    for j in 0..x.n_cols() {
        for (o, &v) in out.iter_mut().zip(x.column(j)) {
            *o += v;
        }
    }
    let p = x.n_cols() as f64;
    for o in &mut out {
        *o /= p;
    }
    out
}

/// Closed-form simple least squares of `y` on the composite `c`.
///
/// A constant composite cannot identify a slope; the fit falls back to the
/// intercept-only model and is flagged `degenerate` rather than erroring,
/// so a replication grid never aborts on a pathological draw.
pub fn ols_fit(c: &[f64], y: &[f64]) -> Result<CompositeFit> {
    if c.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "composite has {} values but response has {}",
            c.len(),
            y.len()
        )));
    }
    if c.len() < 2 {
        return Err(Error::InsufficientData(
            "ols_fit needs at least 2 observations".into(),
        ));
    }
    let n = c.len() as f64;
    let c_mean = c.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut s_cc = 0.0;
    let mut s_cy = 0.0;
    let mut s_yy = 0.0;
    for (&ci, &yi) in c.iter().zip(y) {
        let dc = ci - c_mean;
        let dy = yi - y_mean;
        s_cc += dc * dc;
        s_cy += dc * dy;
        s_yy += dy * dy;
    }
    if s_cc == 0.0 {
        return Ok(CompositeFit {
            intercept: y_mean,
            slope: 0.0,
            train_r2: 0.0,
            degenerate: true,
        });
    }
    let slope = s_cy / s_cc;
    let intercept = y_mean - slope * c_mean;
    let train_r2 = if s_yy == 0.0 {
        1.0
    } else {
        (s_cy * s_cy / (s_cc * s_yy)).min(1.0)
    };
    Ok(CompositeFit {
        intercept,
        slope,
        train_r2,
        degenerate: false,
    })
}

/// `intercept + slope * c` for each entry of `c_new`.
pub fn predict_composite(fit: &CompositeFit, c_new: &[f64]) -> Vec<f64> {
    c_new.iter().map(|&c| fit.intercept + fit.slope * c).collect()
}
