//! The three subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ppbench_core::{
    example_fit_trace, fit_lasso, run_grid, standardize, CellSummary, FitTrace, GridOutput,
    HoldoutKind, LassoParams, PredictorKind, RunConfig, TraceKind,
};

use crate::matrix_csv;
use crate::report::{self, fmt_sig10};
use crate::svg::{self, level_label, Panel};

/// Run the replication grid and write results.csv, summary.json, and one
/// boxplot SVG per panel into `out_dir`. Every artifact is written to a
/// temporary name first and renamed only after the whole set is staged.
pub fn cmd_run(config: &RunConfig, out_dir: &Path) -> Result<()> {
    config.validate().context("validating configuration")?;
    let output = run_grid(config).context("running the replication grid")?;

    let mut files: Vec<(PathBuf, String)> = vec![
        (
            out_dir.join("results.csv"),
            report::results_csv(&output.results),
        ),
        (
            out_dir.join("summary.json"),
            report::summary_json(&output.summaries).context("serializing summaries")?,
        ),
    ];
    for (name, content) in svg_panels(config, &output) {
        files.push((out_dir.join(name), content));
    }

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let staged: Vec<(PathBuf, PathBuf)> = files
        .iter()
        .map(|(path, content)| {
            let tmp = tmp_name(path);
            std::fs::write(&tmp, content)
                .with_context(|| format!("writing {}", tmp.display()))?;
            Ok((tmp, path.clone()))
        })
        .collect::<Result<_>>()
        .context("staging output files")?;
    for (tmp, path) in staged {
        std::fs::rename(&tmp, &path)
            .with_context(|| format!("renaming {} into place", path.display()))?;
    }

    let converged = output
        .results
        .iter()
        .filter(|r| r.lasso_converged)
        .count();
    println!(
        "wrote {} replications over {} cells to {} ({} files, {}/{} lasso fits converged)",
        output.results.len(),
        output.summaries.len(),
        out_dir.display(),
        files.len(),
        converged,
        output.results.len()
    );
    Ok(())
}

type MetricPick = fn(&CellSummary) -> &ppbench_core::BoxStats;

/// One SVG per (predictor kind, metric) pair per requested holdout scheme.
fn svg_panels(config: &RunConfig, output: &GridOutput) -> Vec<(String, String)> {
    let metrics: [(&str, &str, MetricPick); 3] = [
        ("lasso_rmse", "Lasso RMSE", |s| &s.lasso_rmse),
        ("composite_rmse", "Composite RMSE", |s| &s.composite_rmse),
        ("ratio", "RMSE ratio (lasso / composite)", |s| &s.ratio),
    ];
    let kinds = [
        (
            PredictorKind::PseudoProxy,
            "pseudo-proxy predictors",
            "Signal-to-noise ratio",
        ),
        (
            PredictorKind::Ar1,
            "independent AR(1) predictors",
            "AR(1) coefficient",
        ),
    ];
    let mut panels = Vec::new();
    for &holdout in &config.holdout {
        for (kind, kind_text, x_label) in kinds {
            let cells: Vec<&CellSummary> = output
                .summaries
                .iter()
                .filter(|s| s.predictor_kind == kind && s.holdout == holdout)
                .collect();
            if cells.is_empty() {
                continue;
            }
            for (metric_id, metric_text, pick) in metrics {
                let panel = Panel {
                    title: format!("{metric_text}, {kind_text} ({holdout} holdout)"),
                    x_label: x_label.to_string(),
                    y_label: metric_text.to_string(),
                    level_labels: cells.iter().map(|s| level_label(s.level)).collect(),
                    stats: cells.iter().map(|s| pick(s)).collect(),
                };
                let name = format!("boxplot_{kind}_{metric_id}_{holdout}.svg");
                panels.push((name, svg::render_boxplot(&panel)));
            }
        }
    }
    panels
}

/// Write the trace of one illustrative fit as CSV (columns
/// `t,target,fitted,is_validation`), with a `#` metadata line carrying the
/// nonzero-coefficient count for the lasso trace.
pub fn cmd_example_fit(kind: TraceKind, seed: u64, out_path: &Path) -> Result<()> {
    let config = RunConfig::default();
    let trace = example_fit_trace(kind, seed, &config).context("fitting the example")?;
    let text = trace_csv(&trace);
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = tmp_name(out_path);
    std::fs::write(&tmp, &text).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, out_path)
        .with_context(|| format!("renaming {} into place", out_path.display()))?;
    match trace.lasso_nonzero {
        Some(n) => println!(
            "wrote {} rows to {} (lasso kept {n} of {} predictors)",
            trace.rows.len(),
            out_path.display(),
            config.n_predictors
        ),
        None => println!("wrote {} rows to {}", trace.rows.len(), out_path.display()),
    }
    Ok(())
}

fn trace_csv(trace: &FitTrace) -> String {
    let mut out = String::new();
    if let Some(n) = trace.lasso_nonzero {
        let _ = writeln!(out, "# nonzero_coefficients: {n}");
    }
    out.push_str("t,target,fitted,is_validation\n");
    for row in &trace.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.t,
            fmt_sig10(row.target),
            fmt_sig10(row.fitted),
            row.is_validation
        );
    }
    out
}

/// Fit the lasso on a design/response pair read from CSV and print solver
/// diagnostics. Column indices in the report are 1-based.
pub fn cmd_solve(matrix_path: &Path, response_path: &Path, lambda_fraction: f64) -> Result<()> {
    let x = matrix_csv::read_matrix(matrix_path)?;
    let y = matrix_csv::read_response(response_path)?;
    let params = LassoParams {
        lambda_fraction,
        ..LassoParams::default()
    };
    let fit = fit_lasso(&x, &y, &params).context("fitting the lasso")?;
    let design = standardize(&x, &y).context("standardizing the design")?;
    let _ = design; // standardized moments checked below only in debug builds
    debug_assert!(design.validate_moments().is_ok());

    println!("design: {} rows x {} columns", x.n_rows(), x.n_cols());
    println!("lambda_max: {}", fmt_sig10(fit.lambda_max));
    println!("lambda: {}", fmt_sig10(fit.lambda));
    println!("intercept: {}", fmt_sig10(fit.intercept));
    println!("nonzero coefficients: {} of {}", fit.n_nonzero, x.n_cols());
    for (j, &b) in fit.coefficients.iter().enumerate() {
        if b != 0.0 {
            println!("  ({}, {})", j + 1, fmt_sig10(b));
        }
    }
    println!("kkt_max_violation: {}", fmt_sig10(fit.kkt_max_violation));
    println!("converged: {}", fit.converged);
    println!("sweeps: {}", fit.n_sweeps_total);
    Ok(())
}

fn tmp_name(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Map the `--kind` flag onto a trace kind.
pub fn parse_trace_kind(kind: &str) -> Option<TraceKind> {
    match kind {
        "randomwalk-lasso" => Some(TraceKind::RandomWalkLasso),
        "whitenoise-composite" => Some(TraceKind::WhiteNoiseComposite),
        _ => None,
    }
}

/// Holdout list helper shared with `main`.
pub fn holdout_kinds(config: &RunConfig) -> &[HoldoutKind] {
    &config.holdout
}
