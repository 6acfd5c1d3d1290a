use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::csv::{trace_to_csv, CsvFormat};
use crate::analysis::{empirical_rate, theoretical_rates};
use crate::error::{Error, Result};
use crate::oracle::{MinimaxOracle, Point};
use crate::solvers::{run, Termination, Trace};

/// Relative tolerance between empirical and theoretical linear rates.
pub const RATE_TOLERANCE: f64 = 0.02;

/// Order estimate that counts as superlinear when the predicted rate is 0.
pub const SUPERLINEAR_ORDER: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub label: String,
    pub algorithm: String,
    pub mode: String,
    pub theoretical: Option<f64>,
    pub empirical: Option<f64>,
    pub order_estimate: Option<f64>,
    pub relative_error: Option<f64>,
    pub status: RateStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Theoretical vs empirical rates, one row per run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub tolerance: f64,
    pub rows: Vec<RateRow>,
}

impl RateReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status != RateStatus::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub problem: String,
    pub algorithm: String,
    pub mode: String,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub iterations: usize,
    pub final_point: Point,
    pub final_grad_x_norm: f64,
    pub final_grad_y_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_distance: Option<f64>,
    pub near_singular_steps: usize,
    /// Present when the problem has a known solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<RateReport>,
}

/// Everything `run_experiment` produced.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub trace: Trace,
    pub report: ExperimentReport,
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
}

impl ExperimentOutcome {
    pub fn success(&self) -> bool {
        self.trace.termination.is_success()
    }

    /// 0 on `grad_tol`/`dist_tol`, 1 on `max_iter`, 2 on numerical failure.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.trace.termination)
    }
}

pub fn exit_code(t: Termination) -> i32 {
    match t {
        Termination::GradTol | Termination::DistTol => 0,
        Termination::MaxIter => 1,
        Termination::NumericalFailure => 2,
    }
}

/// Compares the trace's fitted rate with the theorem formula at the known
/// solution.
pub fn rate_row(label: &str, config: &ExperimentConfig, oracle: &dyn MinimaxOracle, trace: &Trace) -> RateRow {
    let spec = &config.solver;
    let mut row = RateRow {
        label: label.to_string(),
        algorithm: spec.algorithm.to_string(),
        mode: spec.mode().to_string(),
        theoretical: None,
        empirical: None,
        order_estimate: None,
        relative_error: None,
        status: RateStatus::Skipped,
        note: None,
    };
    let mut notes = Vec::new();
    match oracle.known_solution().map(|z| theoretical_rates(oracle, &z, spec.alpha_l, spec.alpha_f)) {
        Some(Ok(report)) => {
            row.theoretical = report.predicted_rate(spec);
            if row.theoretical.is_none() {
                notes.push(format!("no closed-form rate for {} ({})", spec.algorithm, spec.mode()));
            }
        }
        Some(Err(e)) => notes.push(format!("theoretical rate unavailable: {e}")),
        None => notes.push("no known solution".into()),
    }
    match empirical_rate(trace, config.run.burn_in) {
        Ok(est) => {
            row.empirical = Some(est.linear_rate);
            row.order_estimate = Some(est.order_estimate);
        }
        Err(e) => notes.push(format!("empirical rate unavailable: {e}")),
    }
    match (row.theoretical, row.empirical, row.order_estimate) {
        (Some(th), Some(emp), _) if th > 0.0 => {
            let rel = (emp - th).abs() / th;
            row.relative_error = Some(rel);
            row.status = if rel <= RATE_TOLERANCE { RateStatus::Pass } else { RateStatus::Fail };
        }
        (Some(_), Some(_), Some(order)) => {
            row.status = if order >= SUPERLINEAR_ORDER { RateStatus::Pass } else { RateStatus::Fail };
        }
        _ => {}
    }
    if !notes.is_empty() {
        row.note = Some(notes.join("; "));
    }
    row
}

/// Runs the configured solver in memory.
pub fn execute(config: &ExperimentConfig) -> Result<(Trace, ExperimentReport)> {
    execute_labelled(config, &config.solver.algorithm.to_string())
}

pub(crate) fn execute_labelled(config: &ExperimentConfig, label: &str) -> Result<(Trace, ExperimentReport)> {
    let oracle = config.build_problem()?;
    let z0 = config.initial_point(oracle.as_ref())?;
    let trace = run(oracle.as_ref(), &config.solver, &z0, &config.stop_criteria(oracle.as_ref()))?;
    let rates = oracle
        .known_solution()
        .map(|_| RateReport { tolerance: RATE_TOLERANCE, rows: vec![rate_row(label, config, oracle.as_ref(), &trace)] });
    let last = trace.last();
    let report = ExperimentReport {
        problem: oracle.name().to_string(),
        algorithm: config.solver.algorithm.to_string(),
        mode: config.solver.mode().to_string(),
        termination: trace.termination,
        failure: trace.failure.clone(),
        iterations: trace.iterations(),
        final_point: last.z.clone(),
        final_grad_x_norm: last.grad_x_norm,
        final_grad_y_norm: last.grad_y_norm,
        final_distance: last.distance(),
        near_singular_steps: trace.near_singular_steps,
        rates,
    };
    Ok((trace, report))
}

pub(crate) fn csv_format(config: &ExperimentConfig) -> CsvFormat {
    CsvFormat { precision: config.output.float_precision, wall_time: config.output.wall_time }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs the experiment and writes the trace CSV and JSON report under
/// `out_dir` (relative output paths are resolved against it). A numerical
/// failure still writes both files; check [`ExperimentOutcome::exit_code`].
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    let (trace, report) = execute(config)?;
    let trace_path = out_dir.join(&config.output.trace_path);
    let report_path = out_dir.join(&config.output.report_path);
    write_file(&trace_path, &trace_to_csv(&trace, csv_format(config)))?;
    write_file(&report_path, &to_json(&report))?;
    Ok(ExperimentOutcome { trace, report, trace_path, report_path })
}
