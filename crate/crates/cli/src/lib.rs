//! Command-line front end for the surrogate lasso benchmark: configuration
//! ingestion, the `run` / `example-fit` / `solve` subcommands, and the
//! frozen file outputs (results CSV, summary JSON, boxplot SVG, trace CSV).

pub mod commands;
pub mod config;
pub mod matrix_csv;
pub mod report;
pub mod svg;
