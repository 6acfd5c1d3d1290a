//! Config-driven experiments: TOML documents in, trace CSVs and JSON
//! reports out.

mod compare;
mod config;
mod csv;
mod experiment;

pub use compare::{compare_algorithms, CompareEntry, CompareOutcome, CompareReport, COMPARE_CSV, COMPARE_REPORT};
pub use config::{
    parse_config, ExperimentConfig, InitConfig, InitMode, OutputConfig, ProblemConfig, RunConfig, MAX_FLOAT_PRECISION, SCHEMA_VERSION,
};
pub use csv::{aligned_csv, format_float, trace_to_csv, CsvFormat, TRACE_FIELDS, TRACE_HEADER};
pub use experiment::{
    execute, exit_code, rate_row, run_experiment, ExperimentOutcome, ExperimentReport, RateReport, RateRow, RateStatus, RATE_TOLERANCE,
    SUPERLINEAR_ORDER,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MINIMAX_OUT_DIR";

#[cfg(test)]
mod tests;
