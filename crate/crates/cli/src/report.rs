//! Frozen output serializers: results.csv and summary.json.

use std::fmt::Write as _;

use anyhow::Result;
use ppbench_core::{CellSummary, ReplicationResult};

/// Floats in results.csv carry 10 significant digits.
pub fn fmt_sig10(v: f64) -> String {
    format!("{v:.9e}")
}

pub const RESULTS_HEADER: &str =
    "predictor_kind,level,holdout,rep,lasso_rmse,composite_rmse,ratio,lasso_converged,lasso_nonzero";

/// Serialize grid results. Rows arrive from the harness already in the
/// frozen order (predictor kind, configured level order, holdout, rep).
pub fn results_csv(results: &[ReplicationResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.predictor_kind,
            fmt_sig10(r.level),
            r.holdout,
            r.replication_index,
            fmt_sig10(r.lasso_rmse),
            fmt_sig10(r.composite_rmse),
            fmt_sig10(r.ratio),
            r.lasso_converged,
            r.lasso_nonzero
        );
    }
    out
}

/// Pretty-printed JSON array with one record per cell.
pub fn summary_json(summaries: &[CellSummary]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(summaries)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ppbench_core::{run_grid, HoldoutKind, RunConfig};

    fn tiny_grid() -> ppbench_core::GridOutput {
        run_grid(&RunConfig {
            replications: 3,
            n_predictors: 15,
            snr_levels: vec![2.0],
            ar_levels: vec![1.0],
            holdout: vec![HoldoutKind::End],
            ..RunConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn sig10_formatting() {
        assert_eq!(fmt_sig10(0.125), "1.250000000e-1");
        assert_eq!(fmt_sig10(-37.5), "-3.750000000e1");
        assert_eq!(fmt_sig10(0.0), "0.000000000e0");
    }

    #[test]
    fn csv_has_header_and_one_row_per_replication() {
        let out = tiny_grid();
        let csv = results_csv(&out.results);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("pseudo_proxy,2.000000000e0,end,0,"));
        assert!(lines[4].starts_with("ar1,1.000000000e0,end,0,"));
    }

    #[test]
    fn csv_floats_round_trip_within_contract() {
        let out = tiny_grid();
        let csv = results_csv(&out.results);
        let row1: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let lasso: f64 = row1[4].parse().unwrap();
        let reference = out.results[0].lasso_rmse;
        assert!((lasso - reference).abs() <= 1e-9 * reference.abs());
    }

    #[test]
    fn summary_json_round_trips() {
        let out = tiny_grid();
        let text = summary_json(&out.summaries).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let records = parsed.as_array().unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0]["predictor_kind"], "pseudo_proxy");
        assert_eq!(records[0]["n_reps"], 3);
        let med = records[0]["lasso_rmse"]["median"].as_f64().unwrap();
        assert_eq!(med, out.summaries[0].lasso_rmse.median);
    }
}
