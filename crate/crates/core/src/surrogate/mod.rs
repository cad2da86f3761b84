//! Seed-derived generation of the target series and predictor ensembles.
//!
//! The target is a linear trend plus a stationary AR(1) process. Predictors
//! come in two flavors: pseudo-proxies (target plus white noise at a chosen
//! signal-to-noise ratio) and independent AR(1) series sharing a common
//! coefficient. All generators are pure functions of their spec and stream
//! key, which is what makes the replication grid deterministic under
//! arbitrary parallelism.

pub mod stream;

pub use stream::{derive_stream, purpose, NormalStream, StreamKey};

use crate::error::{Error, Result};

/// Parameters of the target series: `y(t) = trend_slope * t + e(t)` for
/// `t = 1..=length`, with `e` an AR(1) process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub length: usize,
    pub trend_slope: f64,
    pub ar_coef: f64,
    pub innovation_sd: f64,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            length: 149,
            trend_slope: 0.25,
            ar_coef: 0.4,
            innovation_sd: 1.0,
        }
    }
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::InvalidParameter(format!(
                "target length must be >= 2, got {}",
                self.length
            )));
        }
        if !(0.0..1.0).contains(&self.ar_coef) {
            return Err(Error::InvalidParameter(format!(
                "target ar_coef must lie in [0, 1), got {}",
                self.ar_coef
            )));
        }
        if !self.innovation_sd.is_finite() || self.innovation_sd <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "innovation_sd must be a positive finite value, got {}",
                self.innovation_sd
            )));
        }
        if !self.trend_slope.is_finite() {
            return Err(Error::InvalidParameter("trend_slope must be finite".into()));
        }
        Ok(())
    }
}

/// A realized target series together with its sample standard deviation
/// (population convention), the quantity SNRs are expressed against.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSeries {
    values: Vec<f64>,
    sample_sd: f64,
}

impl TargetSeries {
    /// Wrap a realized series, computing its sample sd.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData(
                "target series needs at least 2 values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target series".into()));
        }
        let sample_sd = population_sd(&values);
        Ok(Self { values, sample_sd })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sample_sd(&self) -> f64 {
        self.sample_sd
    }
}

/// Pseudo-proxy ensemble: `n_series` copies of the target plus white noise
/// with sd `target.sample_sd / snr`. `snr = inf` is the noiseless sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyEnsembleSpec {
    pub n_series: usize,
    pub snr: f64,
}

impl ProxyEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_series < 1 {
            return Err(Error::InvalidParameter("n_series must be >= 1".into()));
        }
        if self.snr.is_nan() || self.snr <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "snr must be positive, got {}",
                self.snr
            )));
        }
        Ok(())
    }
}

/// Independent AR(1) predictor ensemble with common coefficient `alpha`;
/// `alpha = 1` means random walks started at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1EnsembleSpec {
    pub n_series: usize,
    pub length: usize,
    pub alpha: f64,
    pub innovation_sd: f64,
}

impl Ar1EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_series < 1 {
            return Err(Error::InvalidParameter("n_series must be >= 1".into()));
        }
        if self.length < 2 {
            return Err(Error::InvalidParameter("length must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !self.innovation_sd.is_finite() || self.innovation_sd <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "innovation_sd must be a positive finite value, got {}",
                self.innovation_sd
            )));
        }
        Ok(())
    }
}

/// Dense column-major predictor matrix (rows = time, columns = series).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl PredictorMatrix {
    /// Build from column-major storage, checking shape and finiteness.
    pub fn from_col_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix must have at least one row and one column".into(),
            ));
        }
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n_rows}x{n_cols} matrix, got {}",
                n_rows * n_cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("predictor matrix".into()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n_rows + row]
    }

    /// New matrix containing the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows) {
            return Err(Error::DimensionMismatch(format!(
                "row index {bad} out of bounds for {} rows",
                self.n_rows
            )));
        }
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty row selection".into()));
        }
        let mut out = Self::zeros(rows.len(), self.n_cols);
        for j in 0..self.n_cols {
            let src = self.column(j);
            let dst = out.column_mut(j);
            for (k, &r) in rows.iter().enumerate() {
                dst[k] = src[r];
            }
        }
        Ok(out)
    }
}

/// Generate the target series: linear trend plus stationary AR(1) noise.
///
/// The AR(1) component is initialized from its stationary distribution
/// (variance `innovation_sd^2 / (1 - ar_coef^2)`), so no burn-in is needed.
/// Consumes `spec.length` sequential variates from `stream`.
pub fn gen_target(spec: &TargetSpec, stream: &mut NormalStream) -> Result<TargetSeries> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.length);
    let stationary_sd = spec.innovation_sd / (1.0 - spec.ar_coef * spec.ar_coef).sqrt();
    let mut eps = stationary_sd * stream.next_normal();
    values.push(spec.trend_slope + eps);
    for t in 1..spec.length {
        eps = spec.ar_coef * eps + spec.innovation_sd * stream.next_normal();
        values.push(spec.trend_slope * (t as f64 + 1.0) + eps);
    }
    TargetSeries::from_values(values)
}

/// Generate the pseudo-proxy ensemble: column `j` is the target plus iid
/// white noise with sd `target.sample_sd / spec.snr`.
///
/// Column `j` reads variates `j*T .. (j+1)*T` of `stream` (T = target
/// length), so the content of the first k columns never depends on
/// `n_series`.
pub fn gen_pseudo_proxies(
    target: &TargetSeries,
    spec: &ProxyEnsembleSpec,
    stream: &NormalStream,
) -> Result<PredictorMatrix> {
    spec.validate()?;
    let n = target.len();
    let noise_sd = if spec.snr.is_infinite() {
        0.0
    } else {
        target.sample_sd() / spec.snr
    };
    let mut m = PredictorMatrix::zeros(n, spec.n_series);
    for j in 0..spec.n_series {
        let base = (j * n) as u64;
        let col = m.column_mut(j);
        for (t, (out, &y)) in col.iter_mut().zip(target.values()).enumerate() {
            *out = y + noise_sd * stream.normal_at(base + t as u64);
        }
    }
    Ok(m)
}

/// Generate the independent AR(1) ensemble.
///
/// For `alpha < 1` each column is a stationary AR(1) path; for `alpha = 1`
/// each column is a random walk started at 0. Column `j` reads variates
/// `j*T .. (j+1)*T` of `stream` regardless of `alpha` (the init slot is
/// simply unused by random walks), preserving prefix stability.
pub fn gen_ar1_ensemble(spec: &Ar1EnsembleSpec, stream: &NormalStream) -> Result<PredictorMatrix> {
    spec.validate()?;
    let n = spec.length;
    let mut m = PredictorMatrix::zeros(n, spec.n_series);
    for j in 0..spec.n_series {
        let base = (j * n) as u64;
        let col = m.column_mut(j);
        if spec.alpha < 1.0 {
            let stationary_sd = spec.innovation_sd / (1.0 - spec.alpha * spec.alpha).sqrt();
            col[0] = stationary_sd * stream.normal_at(base);
            for t in 1..n {
                col[t] = spec.alpha * col[t - 1] + spec.innovation_sd * stream.normal_at(base + t as u64);
            }
        } else {
            col[0] = 0.0;
            for t in 1..n {
                col[t] = col[t - 1] + spec.innovation_sd * stream.normal_at(base + t as u64);
            }
        }
    }
    Ok(m)
}

pub(crate) fn population_sd(values: &[f64]) -> f64 {
    population_variance(values).sqrt()
}

pub(crate) fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}
