//! Pathwise cyclical coordinate-descent lasso.
//!
//! Solves `min (1/2n) * sum_i (y_i - b0 - x_i'b)^2 + lambda * sum_j |b_j|`
//! on the standardized scale, with the penalty set to a fraction of
//! `lambda_max` (the smallest penalty that zeroes every coefficient). The
//! solver warm-starts along a geometric path from `lambda_max` down to the
//! target penalty, iterates over the active set with residual updates, and
//! certifies the final solution against the subgradient optimality
//! conditions before reporting convergence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surrogate::PredictorMatrix;

/// Columns with population sd below `1e-12 * (1 + |mean|)` are treated as
/// constant and excluded from penalized fitting.
const CONSTANT_SD_THRESHOLD: f64 = 1e-12;

/// Solver settings. `lambda_fraction` positions the penalty relative to
/// `lambda_max`; `tol` is the convergence threshold on the maximum
/// per-sweep coefficient change (standardized scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LassoParams {
    pub lambda_fraction: f64,
    pub path_points: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub standardize: bool,
    pub fit_intercept: bool,
}

impl Default for LassoParams {
    fn default() -> Self {
        Self {
            lambda_fraction: 0.05,
            path_points: 20,
            tol: 1e-7,
            max_sweeps: 100_000,
            standardize: true,
            fit_intercept: true,
        }
    }
}

impl LassoParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_fraction.is_nan() || self.lambda_fraction <= 0.0 || self.lambda_fraction > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda_fraction must lie in (0, 1], got {}",
                self.lambda_fraction
            )));
        }
        if self.path_points < 1 {
            return Err(Error::InvalidParameter("path_points must be >= 1".into()));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_sweeps < 1 {
            return Err(Error::InvalidParameter("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// A fitted lasso model on the original data scale, with the diagnostics
/// needed to audit the solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Effective penalty (standardized scale).
    pub lambda: f64,
    pub lambda_max: f64,
    pub n_sweeps_total: usize,
    pub converged: bool,
    pub kkt_max_violation: f64,
    pub n_nonzero: usize,
}

/// A design prepared for coordinate descent: columns centered and scaled to
/// unit 1/n-convention sd (per the flags it was built with), response
/// centered, constant columns flagged and excluded.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    n: usize,
    p: usize,
    x: PredictorMatrix,
    y: Vec<f64>,
    column_means: Vec<f64>,
    column_sds: Vec<f64>,
    y_mean: f64,
    constant: Vec<bool>,
    /// (1/n) * ||x_j||^2 of the transformed columns.
    col_norm_sq: Vec<f64>,
    centered: bool,
    scaled: bool,
}

impl StandardizedDesign {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    /// Population-convention sds of the original columns.
    pub fn column_sds(&self) -> &[f64] {
        &self.column_sds
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn is_constant(&self, j: usize) -> bool {
        self.constant[j]
    }

    /// Recompute the moments of every retained transformed column and check
    /// them against the standardization contract (mean 0 and unit
    /// 1/n-convention sd, each within 1e-10).
    pub fn validate_moments(&self) -> Result<()> {
        for j in 0..self.p {
            if self.constant[j] {
                continue;
            }
            let col = self.x.column(j);
            let mean = col.iter().sum::<f64>() / self.n as f64;
            if self.centered && mean.abs() > 1e-10 {
                return Err(Error::DegenerateDesign(format!(
                    "standardized column {j} has mean {mean}"
                )));
            }
            if self.scaled {
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.n as f64;
                if (var.sqrt() - 1.0).abs() > 1e-10 {
                    return Err(Error::DegenerateDesign(format!(
                        "standardized column {j} has sd {}",
                        var.sqrt()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Map original-scale coefficients onto the transformed scale the solver
    /// works in.
    fn transformed_coefficients(&self, coefficients: &[f64]) -> Vec<f64> {
        coefficients
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                if self.constant[j] {
                    0.0
                } else if self.scaled {
                    b * self.column_sds[j]
                } else {
                    b
                }
            })
            .collect()
    }
}

/// `sign(z) * max(|z| - gamma, 0)`, the lasso coordinate update kernel.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0);
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Center and scale a training design (default flags: both on).
pub fn standardize(x: &PredictorMatrix, y: &[f64]) -> Result<StandardizedDesign> {
    standardize_with(x, y, true, true)
}

fn standardize_with(
    x: &PredictorMatrix,
    y: &[f64],
    scale: bool,
    center: bool,
) -> Result<StandardizedDesign> {
    let n = x.n_rows();
    let p = x.n_cols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows but response has {} values",
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData(
            "standardization needs at least 2 rows".into(),
        ));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response".into()));
    }

    let nf = n as f64;
    let mut column_means = Vec::with_capacity(p);
    let mut column_sds = Vec::with_capacity(p);
    let mut constant = Vec::with_capacity(p);
    let mut data = Vec::with_capacity(n * p);
    for j in 0..p {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / nf;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
        let sd = var.sqrt();
        let is_const = sd <= CONSTANT_SD_THRESHOLD * (1.0 + mean.abs());
        column_means.push(mean);
        column_sds.push(sd);
        constant.push(is_const);
        if is_const {
            // Excluded from fitting; a zero column makes its updates no-ops.
            data.resize(data.len() + n, 0.0);
        } else {
            let shift = if center { mean } else { 0.0 };
            let denom = if scale { sd } else { 1.0 };
            data.extend(col.iter().map(|v| (v - shift) / denom));
        }
    }
    if constant.iter().all(|&c| c) {
        return Err(Error::DegenerateDesign(
            "every predictor column is constant".into(),
        ));
    }

    let y_mean = if center { y.iter().sum::<f64>() / nf } else { 0.0 };
    let y_centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let x_t = PredictorMatrix::from_col_major(n, p, data)?;
    let col_norm_sq: Vec<f64> = (0..p)
        .map(|j| {
            if constant[j] {
                0.0
            } else {
                x_t.column(j).iter().map(|v| v * v).sum::<f64>() / nf
            }
        })
        .collect();

    Ok(StandardizedDesign {
        n,
        p,
        x: x_t,
        y: y_centered,
        column_means,
        column_sds,
        y_mean,
        constant,
        col_norm_sq,
        centered: center,
        scaled: scale,
    })
}

/// Smallest penalty at which the all-zero coefficient vector is optimal:
/// `max_j |<x_j, y>| / n` over retained columns of the prepared design.
pub fn lambda_max(design: &StandardizedDesign) -> f64 {
    let nf = design.n as f64;
    let mut best = 0.0_f64;
    for j in 0..design.p {
        if design.constant[j] {
            continue;
        }
        let g = dot(design.x.column(j), &design.y) / nf;
        best = best.max(g.abs());
    }
    best
}

/// Fit the lasso at `lambda = lambda_fraction * lambda_max` via the
/// warm-started coordinate-descent path. Coefficients and intercept come
/// back on the original data scale.
///
/// Non-convergence within the sweep budget is reported through
/// `LassoFit::converged`, not as an error.
pub fn fit_lasso(x: &PredictorMatrix, y: &[f64], params: &LassoParams) -> Result<LassoFit> {
    params.validate()?;
    let design = standardize_with(x, y, params.standardize, params.fit_intercept)?;

    let lam_max = lambda_max(&design);
    let lam_target = params.lambda_fraction * lam_max;
    let path = lambda_path(lam_max, params.lambda_fraction, params.path_points);

    let mut cd = CdState::new(&design);
    let mut total_sweeps = 0usize;
    let mut converged = false;
    let mut kkt = f64::INFINITY;
    let last = path.len() - 1;
    for (k, &lam) in path.iter().enumerate() {
        let outcome = cd.solve(lam, params.tol, params.max_sweeps, &mut total_sweeps, k == last);
        if k == last {
            converged = outcome.converged;
            kkt = outcome.kkt_violation;
        } else if !outcome.converged {
            // Budget exhausted mid-path; certify whatever we have at the target.
            cd.refresh_residual();
            kkt = cd.kkt_violation(lam_target);
            converged = false;
            break;
        }
    }

    let coefficients: Vec<f64> = (0..design.p)
        .map(|j| {
            if design.constant[j] {
                0.0
            } else if design.scaled {
                cd.beta[j] / design.column_sds[j]
            } else {
                cd.beta[j]
            }
        })
        .collect();
    let intercept = if params.fit_intercept {
        design.y_mean
            - coefficients
                .iter()
                .zip(&design.column_means)
                .map(|(b, m)| b * m)
                .sum::<f64>()
    } else {
        0.0
    };
    let n_nonzero = coefficients.iter().filter(|b| **b != 0.0).count();

    Ok(LassoFit {
        intercept,
        coefficients,
        lambda: lam_target,
        lambda_max: lam_max,
        n_sweeps_total: total_sweeps,
        converged,
        kkt_max_violation: kkt,
        n_nonzero,
    })
}

/// Predictions `intercept + X b` for new rows, original scale.
pub fn predict(fit: &LassoFit, x_new: &PredictorMatrix) -> Result<Vec<f64>> {
    if x_new.n_cols() != fit.coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} coefficients but matrix has {} columns",
            fit.coefficients.len(),
            x_new.n_cols()
        )));
    }
    let mut out = vec![fit.intercept; x_new.n_rows()];
    for (j, &b) in fit.coefficients.iter().enumerate() {
        if b == 0.0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(x_new.column(j)) {
            *o += b * v;
        }
    }
    Ok(out)
}

/// Maximum violation of the lasso subgradient conditions at `fit.lambda`,
/// evaluated on the transformed scale of `design` with a freshly computed
/// residual. Zero-coefficient violations are `max(|g_j| - lambda, 0)`;
/// active-coefficient violations are `|g_j - lambda * sign|`.
pub fn kkt_check(fit: &LassoFit, design: &StandardizedDesign) -> Result<f64> {
    if fit.coefficients.len() != design.p {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} coefficients but design has {} columns",
            fit.coefficients.len(),
            design.p
        )));
    }
    let beta_t = design.transformed_coefficients(&fit.coefficients);
    let mut resid = design.y.clone();
    for (j, &b) in beta_t.iter().enumerate() {
        if b != 0.0 {
            axpy(&mut resid, design.x.column(j), -b);
        }
    }
    Ok(max_kkt_violation(design, &beta_t, &resid, fit.lambda))
}

fn lambda_path(lam_max: f64, fraction: f64, points: usize) -> Vec<f64> {
    if points == 1 || fraction >= 1.0 || lam_max == 0.0 {
        return vec![fraction * lam_max];
    }
    (0..points)
        .map(|k| lam_max * fraction.powf(k as f64 / (points - 1) as f64))
        .collect()
}

struct SolveOutcome {
    converged: bool,
    kkt_violation: f64,
}

struct CdState<'a> {
    design: &'a StandardizedDesign,
    beta: Vec<f64>,
    resid: Vec<f64>,
    is_active: Vec<bool>,
    active: Vec<usize>,
}

impl<'a> CdState<'a> {
    fn new(design: &'a StandardizedDesign) -> Self {
        Self {
            design,
            beta: vec![0.0; design.p],
            resid: design.y.clone(),
            is_active: vec![false; design.p],
            active: Vec::new(),
        }
    }

    /// One coordinate update; returns the absolute coefficient change.
    #[inline]
    fn update_coord(&mut self, j: usize, lambda: f64) -> f64 {
        let v = self.design.col_norm_sq[j];
        let xj = self.design.x.column(j);
        let b_old = self.beta[j];
        let z = dot(xj, &self.resid) / self.design.n as f64 + v * b_old;
        let b_new = soft_threshold(z, lambda) / v;
        if b_new != b_old {
            axpy(&mut self.resid, xj, b_old - b_new);
            self.beta[j] = b_new;
            if b_new != 0.0 && !self.is_active[j] {
                self.is_active[j] = true;
                self.active.push(j);
            }
        }
        (b_new - b_old).abs()
    }

    fn sweep_full(&mut self, lambda: f64) -> f64 {
        let before = self.objective(lambda);
        let mut max_change = 0.0_f64;
        for j in 0..self.design.p {
            if self.design.constant[j] {
                continue;
            }
            max_change = max_change.max(self.update_coord(j, lambda));
        }
        self.assert_monotone(before, lambda);
        max_change
    }

    fn sweep_active(&mut self, lambda: f64) -> f64 {
        let before = self.objective(lambda);
        let mut max_change = 0.0_f64;
        for idx in 0..self.active.len() {
            let j = self.active[idx];
            max_change = max_change.max(self.update_coord(j, lambda));
        }
        self.assert_monotone(before, lambda);
        max_change
    }

    #[inline]
    fn assert_monotone(&self, before: f64, lambda: f64) {
        if cfg!(debug_assertions) {
            let after = self.objective(lambda);
            debug_assert!(
                after <= before + 1e-9 * (1.0 + before.abs()),
                "objective rose across a sweep: {before} -> {after}"
            );
        }
    }

    /// Penalized objective at the current iterate (transformed scale).
    fn objective(&self, lambda: f64) -> f64 {
        let nf = self.design.n as f64;
        let rss: f64 = self.resid.iter().map(|r| r * r).sum();
        let l1: f64 = self.active.iter().map(|&j| self.beta[j].abs()).sum();
        rss / (2.0 * nf) + lambda * l1
    }

    /// Drop re-zeroed coordinates from the active list.
    fn prune_active(&mut self) {
        let beta = &self.beta;
        let is_active = &mut self.is_active;
        self.active.retain(|&j| {
            if beta[j] != 0.0 {
                true
            } else {
                is_active[j] = false;
                false
            }
        });
    }

    /// Recompute the residual from scratch, clearing float drift accumulated
    /// by incremental updates.
    fn refresh_residual(&mut self) {
        self.resid.copy_from_slice(&self.design.y);
        for &j in &self.active {
            let b = self.beta[j];
            if b != 0.0 {
                axpy(&mut self.resid, self.design.x.column(j), -b);
            }
        }
    }

    fn kkt_violation(&self, lambda: f64) -> f64 {
        max_kkt_violation(self.design, &self.beta, &self.resid, lambda)
    }

    /// Exact minimization over the current active face: solve the
    /// stationarity system `(1/n) X_A'X_A b = (1/n) X_A'y - lambda*s` for
    /// the active coordinates at their current signs, stepping only as far
    /// as sign feasibility allows and dropping coordinates that hit zero.
    ///
    /// Cyclical descent identifies the active set quickly but crawls on
    /// near-equicorrelated designs (pseudo-proxies at high SNR); this step
    /// supplies the precision the subgradient certificate needs. A damped
    /// step toward the face minimizer never raises the convex objective, and
    /// an increase measured after an ill-conditioned solve reverts the step,
    /// so the polish is always safe to attempt.
    fn polish(&mut self, lambda: f64) {
        for _ in 0..20 {
            self.prune_active();
            let k = self.active.len();
            if k == 0 || k > self.design.n {
                return;
            }
            let before = self.objective(lambda);
            let nf = self.design.n as f64;
            let cols = self.active.clone();
            let mut gram = vec![0.0; k * k];
            for a in 0..k {
                let xa = self.design.x.column(cols[a]);
                for b in a..k {
                    let v = dot(xa, self.design.x.column(cols[b])) / nf;
                    gram[a * k + b] = v;
                    gram[b * k + a] = v;
                }
            }
            let signs: Vec<f64> = cols.iter().map(|&j| self.beta[j].signum()).collect();
            let rhs: Vec<f64> = cols
                .iter()
                .zip(&signs)
                .map(|(&j, s)| dot(self.design.x.column(j), &self.design.y) / nf - lambda * s)
                .collect();
            let Some(solution) = solve_spd(gram, rhs, k) else {
                return;
            };

            // Largest step toward the face minimizer that keeps every sign;
            // the limiting coordinate lands exactly on zero.
            let mut t = 1.0_f64;
            for i in 0..k {
                let b = self.beta[cols[i]];
                let s = solution[i];
                if s == 0.0 || s.signum() != b.signum() {
                    t = t.min(b / (b - s));
                }
            }
            let old: Vec<f64> = cols.iter().map(|&j| self.beta[j]).collect();
            for i in 0..k {
                let j = cols[i];
                let stepped = old[i] + t * (solution[i] - old[i]);
                self.beta[j] = if stepped == 0.0 || stepped.signum() != signs[i] {
                    0.0
                } else {
                    stepped
                };
            }
            self.refresh_residual();
            let after = self.objective(lambda);
            if after > before + 1e-12 * (1.0 + before.abs()) {
                for (i, &j) in cols.iter().enumerate() {
                    self.beta[j] = old[i];
                }
                self.refresh_residual();
                return;
            }
            if t >= 1.0 {
                return;
            }
        }
    }

    /// Coordinate descent at one penalty. Alternates active-set passes with
    /// full sweeps that scan for violators, polishing the active face after
    /// each block; on the final path point the solution must additionally
    /// pass the subgradient certificate (violation <= 10*tol) before being
    /// declared converged.
    fn solve(
        &mut self,
        lambda: f64,
        tol: f64,
        max_sweeps: usize,
        total_sweeps: &mut usize,
        certify: bool,
    ) -> SolveOutcome {
        loop {
            if *total_sweeps >= max_sweeps {
                return self.give_up(lambda);
            }
            let full_change = self.sweep_full(lambda);
            *total_sweeps += 1;
            self.prune_active();
            if full_change < tol {
                if !certify {
                    return SolveOutcome {
                        converged: true,
                        kkt_violation: f64::NAN,
                    };
                }
                self.refresh_residual();
                let violation = self.kkt_violation(lambda);
                if violation <= 10.0 * tol {
                    return SolveOutcome {
                        converged: true,
                        kkt_violation: violation,
                    };
                }
                self.polish(lambda);
                continue;
            }
            let mut inner = 0;
            loop {
                if *total_sweeps >= max_sweeps {
                    return self.give_up(lambda);
                }
                let change = self.sweep_active(lambda);
                *total_sweeps += 1;
                inner += 1;
                if change < tol || inner >= 30 {
                    break;
                }
            }
            self.polish(lambda);
        }
    }

    fn give_up(&mut self, lambda: f64) -> SolveOutcome {
        self.refresh_residual();
        SolveOutcome {
            converged: false,
            kkt_violation: self.kkt_violation(lambda),
        }
    }
}

/// Solve a symmetric positive-definite system by Cholesky factorization.
/// Returns None when a pivot collapses (rank-deficient active face).
fn solve_spd(mut a: Vec<f64>, mut b: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    let max_diag = (0..k).map(|i| a[i * k + i]).fold(0.0_f64, f64::max);
    let floor = 1e-12 * max_diag.max(f64::MIN_POSITIVE);
    for i in 0..k {
        for j in 0..i {
            let mut s = a[i * k + j];
            for l in 0..j {
                s -= a[i * k + l] * a[j * k + l];
            }
            a[i * k + j] = s / a[j * k + j];
        }
        let mut d = a[i * k + i];
        for l in 0..i {
            let v = a[i * k + l];
            d -= v * v;
        }
        if d <= floor {
            return None;
        }
        a[i * k + i] = d.sqrt();
    }
    for i in 0..k {
        let mut s = b[i];
        for l in 0..i {
            s -= a[i * k + l] * b[l];
        }
        b[i] = s / a[i * k + i];
    }
    for i in (0..k).rev() {
        let mut s = b[i];
        for l in i + 1..k {
            s -= a[l * k + i] * b[l];
        }
        b[i] = s / a[i * k + i];
    }
    Some(b)
}

fn max_kkt_violation(
    design: &StandardizedDesign,
    beta_t: &[f64],
    resid: &[f64],
    lambda: f64,
) -> f64 {
    let nf = design.n as f64;
    let mut worst = 0.0_f64;
    for (j, &b) in beta_t.iter().enumerate() {
        if design.constant[j] {
            continue;
        }
        let g = dot(design.x.column(j), resid) / nf;
        let v = if b == 0.0 {
            (g.abs() - lambda).max(0.0)
        } else {
            (g - lambda * b.signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Dot product with four independent accumulators; a fixed summation order
/// keeps results bit-reproducible.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0_f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (xa, xb) in ca.zip(cb) {
        acc[0] += xa[0] * xb[0];
        acc[1] += xa[1] * xb[1];
        acc[2] += xa[2] * xb[2];
        acc[3] += xa[3] * xb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub(crate) fn axpy(out: &mut [f64], x: &[f64], a: f64) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::{derive_stream, StreamKey};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn matrix(n: usize, cols: &[&[f64]]) -> PredictorMatrix {
        let mut data = Vec::new();
        for c in cols {
            assert_eq!(c.len(), n);
            data.extend_from_slice(c);
        }
        PredictorMatrix::from_col_major(n, cols.len(), data).unwrap()
    }

    fn random_instance(seed: u64, n: usize, p: usize) -> (PredictorMatrix, Vec<f64>) {
        let mut s = derive_stream(StreamKey::new(seed, 0, 0, 7));
        let data: Vec<f64> = (0..n * p).map(|_| s.next_normal()).collect();
        let x = PredictorMatrix::from_col_major(n, p, data).unwrap();
        // Planted sparse signal plus noise.
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = 0.5 * s.next_normal();
                v += 1.5 * x.get(i, 0);
                if p > 1 {
                    v -= 2.0 * x.get(i, 1);
                }
                v
            })
            .collect();
        (x, y)
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn standardize_small_column() {
        let x = matrix(3, &[&[1.0, 2.0, 3.0]]);
        let y = vec![1.0, 2.0, 4.0];
        let d = standardize(&x, &y).unwrap();
        let col = d.x.column(0);
        assert_abs_diff_eq!(col[0], -1.2247, epsilon = 1e-4);
        assert_abs_diff_eq!(col[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(col[2], 1.2247, epsilon = 1e-4);
        d.validate_moments().unwrap();
    }

    #[test]
    fn standardize_flags_constant_columns() {
        let x = matrix(3, &[&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]]);
        let d = standardize(&x, &[1.0, 2.0, 3.0]).unwrap();
        assert!(d.is_constant(0));
        assert!(!d.is_constant(1));
        d.validate_moments().unwrap();
    }

    #[test]
    fn standardize_rejects_all_constant_design() {
        let x = matrix(3, &[&[5.0, 5.0, 5.0], &[2.0, 2.0, 2.0]]);
        assert!(matches!(
            standardize(&x, &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateDesign(_))
        ));
    }

    #[test]
    fn standardize_moments_hold_on_random_designs() {
        for seed in 0..5 {
            let (x, y) = random_instance(seed, 23, 7);
            standardize(&x, &y).unwrap().validate_moments().unwrap();
        }
    }

    #[test]
    fn lambda_max_zero_when_response_orthogonal() {
        // Constant response centers to zero, orthogonal to every column.
        let x = matrix(4, &[&[1.0, 2.0, 3.0, 4.0]]);
        let d = standardize(&x, &[2.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(lambda_max(&d), 0.0);
    }

    #[test]
    fn lambda_max_recovers_scale_of_aligned_response() {
        // y = c * standardized column (mean zero) => lambda_max = c.
        let raw = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x = matrix(5, &[&raw]);
        let pre = standardize(&x, &[0.0; 5]).unwrap();
        let c = 2.5;
        let y: Vec<f64> = pre.x.column(0).iter().map(|v| c * v).collect();
        let d = standardize(&x, &y).unwrap();
        assert_abs_diff_eq!(lambda_max(&d), c, epsilon = 1e-12);
    }

    #[test]
    fn full_fraction_fit_is_all_zero_with_mean_intercept() {
        let (x, y) = random_instance(3, 12, 6);
        let params = LassoParams {
            lambda_fraction: 1.0,
            ..LassoParams::default()
        };
        let fit = fit_lasso(&x, &y, &params).unwrap();
        assert!(fit.coefficients.iter().all(|&b| b == 0.0));
        assert_eq!(fit.n_nonzero, 0);
        let y_mean = y.iter().sum::<f64>() / y.len() as f64;
        assert_abs_diff_eq!(fit.intercept, y_mean, epsilon = 1e-12);
        assert!(fit.converged);
        assert!(fit.kkt_max_violation <= 1e-12);
    }

    #[test]
    fn single_predictor_matches_soft_threshold_formula() {
        let (x, y) = random_instance(11, 15, 1);
        let params = LassoParams::default();
        let fit = fit_lasso(&x, &y, &params).unwrap();
        let d = standardize(&x, &y).unwrap();
        let g = dot(d.x.column(0), &d.y) / d.n() as f64;
        let expected_std = soft_threshold(g, fit.lambda);
        let got_std = fit.coefficients[0] * d.column_sds()[0];
        assert_abs_diff_eq!(got_std, expected_std, epsilon = 1e-9);
    }

    #[test]
    fn ols_limit_reproduces_noiseless_single_predictor() {
        let raw: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = raw.iter().map(|v| 3.0 + 2.0 * v).collect();
        let x = matrix(10, &[&raw]);
        let params = LassoParams {
            lambda_fraction: 1e-12,
            ..LassoParams::default()
        };
        let fit = fit_lasso(&x, &y, &params).unwrap();
        let pred = predict(&fit, &x).unwrap();
        for (p, t) in pred.iter().zip(&y) {
            assert_abs_diff_eq!(p, t, epsilon = 1e-8);
        }
    }

    #[test]
    fn predict_with_zero_coefficients_is_constant() {
        let fit = LassoFit {
            intercept: 4.5,
            coefficients: vec![0.0, 0.0],
            lambda: 1.0,
            lambda_max: 1.0,
            n_sweeps_total: 0,
            converged: true,
            kkt_max_violation: 0.0,
            n_nonzero: 0,
        };
        let x = matrix(3, &[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(predict(&fit, &x).unwrap(), vec![4.5, 4.5, 4.5]);
    }

    #[test]
    fn predict_is_affine() {
        let (x, y) = random_instance(5, 10, 4);
        let fit = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        let (a, _) = random_instance(6, 7, 4);
        let (b, _) = random_instance(7, 7, 4);
        let sum_data: Vec<f64> = (0..4)
            .flat_map(|j| {
                a.column(j)
                    .iter()
                    .zip(b.column(j))
                    .map(|(u, v)| u + v)
                    .collect::<Vec<_>>()
            })
            .collect();
        let ab = PredictorMatrix::from_col_major(7, 4, sum_data).unwrap();
        let pa = predict(&fit, &a).unwrap();
        let pb = predict(&fit, &b).unwrap();
        let pab = predict(&fit, &ab).unwrap();
        for i in 0..7 {
            assert_abs_diff_eq!(pa[i] + pb[i] - fit.intercept, pab[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let (x, y) = random_instance(8, 9, 3);
        let fit = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        let (wrong, _) = random_instance(9, 5, 2);
        assert!(predict(&fit, &wrong).is_err());
    }

    #[test]
    fn kkt_zero_for_all_zero_fit_at_lambda_max() {
        let (x, y) = random_instance(21, 10, 5);
        let params = LassoParams {
            lambda_fraction: 1.0,
            ..LassoParams::default()
        };
        let fit = fit_lasso(&x, &y, &params).unwrap();
        let d = standardize(&x, &y).unwrap();
        assert!(kkt_check(&fit, &d).unwrap() <= 1e-12);
    }

    #[test]
    fn kkt_within_certificate_for_converged_fit() {
        let (x, y) = random_instance(22, 30, 12);
        let params = LassoParams::default();
        let fit = fit_lasso(&x, &y, &params).unwrap();
        assert!(fit.converged);
        let d = standardize(&x, &y).unwrap();
        let viol = kkt_check(&fit, &d).unwrap();
        assert!(viol <= 10.0 * params.tol, "violation {viol}");
        assert_abs_diff_eq!(viol, fit.kkt_max_violation, epsilon = 1e-12);
    }

    #[test]
    fn kkt_violation_grows_when_coefficient_perturbed() {
        let (x, y) = random_instance(23, 30, 6);
        let fit = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        let d = standardize(&x, &y).unwrap();
        let base = kkt_check(&fit, &d).unwrap();
        let mut perturbed = fit.clone();
        let j = perturbed
            .coefficients
            .iter()
            .position(|&b| b != 0.0)
            .expect("fit should have a nonzero coefficient");
        perturbed.coefficients[j] += 0.01;
        let bumped = kkt_check(&perturbed, &d).unwrap();
        assert!(bumped > base, "violation did not grow: {base} -> {bumped}");
    }

    #[test]
    fn warm_path_and_cold_start_agree() {
        let (x, y) = random_instance(31, 60, 40);
        let warm = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        let cold_params = LassoParams {
            path_points: 1,
            ..LassoParams::default()
        };
        let cold = fit_lasso(&x, &y, &cold_params).unwrap();
        for (a, b) in warm.coefficients.iter().zip(&cold.coefficients) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(warm.intercept, cold.intercept, epsilon = 1e-5);
    }

    #[test]
    fn column_rescaling_leaves_predictions_unchanged() {
        let (x, y) = random_instance(41, 18, 5);
        let fit = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        let c = -3.7;
        let scaled_data: Vec<f64> = (0..5)
            .flat_map(|j| {
                let f = if j == 2 { c } else { 1.0 };
                x.column(j).iter().map(|v| f * v).collect::<Vec<_>>()
            })
            .collect();
        let xs = PredictorMatrix::from_col_major(18, 5, scaled_data).unwrap();
        let fit_s = fit_lasso(&xs, &y, &LassoParams::default()).unwrap();
        let p = predict(&fit, &x).unwrap();
        let ps = predict(&fit_s, &xs).unwrap();
        for (a, b) in p.iter().zip(&ps) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn zero_vector_exactly_at_and_above_lambda_max() {
        let (x, y) = random_instance(51, 14, 6);
        for fraction in [1.0] {
            let fit = fit_lasso(
                &x,
                &y,
                &LassoParams {
                    lambda_fraction: fraction,
                    ..LassoParams::default()
                },
            )
            .unwrap();
            assert!(fit.coefficients.iter().all(|&b| b == 0.0));
        }
    }

    // ---- brute-force oracle ----------------------------------------------

    /// Penalized objective on the standardized scale, recomputed directly.
    fn standardized_objective(cols: &[Vec<f64>], y_c: &[f64], beta: &[f64], lambda: f64) -> f64 {
        let n = y_c.len();
        let mut rss = 0.0;
        for i in 0..n {
            let pred: f64 = cols.iter().zip(beta).map(|(c, b)| c[i] * b).sum();
            let d = y_c[i] - pred;
            rss += d * d;
        }
        rss / (2.0 * n as f64) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    }

    /// Independent standardization for the oracle (plain arithmetic, no
    /// solver code).
    fn oracle_standardize(x: &PredictorMatrix, y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let n = x.n_rows() as f64;
        let mut cols = Vec::new();
        let mut sds = Vec::new();
        for j in 0..x.n_cols() {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let sd =
                (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            cols.push(col.iter().map(|v| (v - mean) / sd).collect::<Vec<f64>>());
            sds.push(sd);
        }
        let y_mean = y.iter().sum::<f64>() / n;
        let y_c = y.iter().map(|v| v - y_mean).collect();
        (cols, y_c, sds)
    }

    /// Shrinking grid search for the global minimum of the convex penalized
    /// objective; converges to well under the comparison tolerance.
    fn grid_oracle(cols: &[Vec<f64>], y_c: &[f64], lambda: f64) -> Vec<f64> {
        let p = cols.len();
        let n = y_c.len() as f64;
        // Any optimum satisfies lambda * sum|b| <= objective at zero.
        let bound = if lambda > 0.0 {
            y_c.iter().map(|v| v * v).sum::<f64>() / (2.0 * n * lambda) + 1.0
        } else {
            50.0
        };
        let grid = 15usize;
        let mut center = vec![0.0; p];
        let mut half = bound;
        while half > 5e-6 {
            let step = 2.0 * half / (grid - 1) as f64;
            let mut best = center.clone();
            let mut best_obj = f64::INFINITY;
            let mut idx = vec![0usize; p];
            loop {
                let candidate: Vec<f64> = idx
                    .iter()
                    .zip(&center)
                    .map(|(&k, &c)| c - half + k as f64 * step)
                    .collect();
                let obj = standardized_objective(cols, y_c, &candidate, lambda);
                if obj < best_obj {
                    best_obj = obj;
                    best = candidate;
                }
                // odometer over the p-dimensional grid
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] < grid {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                    if d == p {
                        break;
                    }
                }
                if d == p {
                    break;
                }
            }
            center = best;
            half = 3.0 * step;
        }
        center
    }

    #[test]
    fn lambda_max_brackets_the_first_active_coefficient() {
        let (x, y) = random_instance(61, 5, 3);
        let d = standardize(&x, &y).unwrap();
        let lm = lambda_max(&d);
        let (cols, y_c, _) = oracle_standardize(&x, &y);
        let above = grid_oracle(&cols, &y_c, 1.001 * lm);
        assert!(
            above.iter().all(|b| b.abs() < 1e-3),
            "oracle found nonzero coefficients above lambda_max: {above:?}"
        );
        let below = grid_oracle(&cols, &y_c, 0.999 * lm);
        assert!(
            below.iter().any(|b| b.abs() > 1e-5),
            "oracle found no active coefficient below lambda_max: {below:?}"
        );
    }

    #[test]
    fn two_predictor_fit_matches_grid_oracle() {
        let (x, y) = random_instance(62, 8, 2);
        let params = LassoParams::default();
        let fit = fit_lasso(&x, &y, &params).unwrap();
        let (cols, y_c, sds) = oracle_standardize(&x, &y);
        let oracle_std = grid_oracle(&cols, &y_c, fit.lambda);
        for j in 0..2 {
            let oracle_orig = oracle_std[j] / sds[j];
            assert_abs_diff_eq!(fit.coefficients[j], oracle_orig, epsilon = 1e-3);
        }
    }

    proptest! {
        #[test]
        fn soft_threshold_shrinks_toward_zero(z in -1e6_f64..1e6, gamma in 0.0_f64..1e6) {
            let s = soft_threshold(z, gamma);
            prop_assert!(s.abs() <= z.abs());
            prop_assert!(s == 0.0 || s.signum() == z.signum());
            prop_assert!((s.abs() - (z.abs() - gamma).max(0.0)).abs() < 1e-9 * (1.0 + z.abs()));
        }

        #[test]
        fn random_fits_satisfy_kkt_certificate(seed in 0u64..30) {
            let (x, y) = random_instance(seed.wrapping_add(1000), 16, 8);
            let params = LassoParams::default();
            let fit = fit_lasso(&x, &y, &params).unwrap();
            prop_assert!(fit.converged);
            prop_assert!(fit.kkt_max_violation <= 10.0 * params.tol);
            prop_assert_eq!(
                fit.n_nonzero,
                fit.coefficients.iter().filter(|b| **b != 0.0).count()
            );
        }
    }
}
