use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::csv::aligned_csv;
use super::experiment::{csv_format, execute_labelled, to_json, write_file, ExperimentReport, RateReport, RATE_TOLERANCE};
use crate::error::{Error, Result};
use crate::solvers::{Termination, Trace};

pub const COMPARE_CSV: &str = "compare.csv";
pub const COMPARE_REPORT: &str = "compare.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareEntry {
    pub label: String,
    pub algorithm: String,
    pub mode: String,
    pub termination: Termination,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub problem: String,
    pub runs: Vec<CompareEntry>,
    pub rates: RateReport,
}

#[derive(Debug)]
pub struct CompareOutcome {
    pub traces: Vec<(String, Trace)>,
    pub reports: Vec<ExperimentReport>,
    pub summary: CompareReport,
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
}

impl CompareOutcome {
    pub fn trace(&self, label: &str) -> Option<&Trace> {
        self.traces.iter().find(|(l, _)| l == label).map(|(_, t)| t)
    }

    /// 0 iff every run reached a tolerance.
    pub fn exit_code(&self) -> i32 {
        self.traces.iter().map(|(_, t)| super::experiment::exit_code(t.termination)).max().unwrap_or(0)
    }
}

/// Column-group labels: the algorithm name, suffixed with the mode or an
/// index when names repeat.
fn labels(configs: &[ExperimentConfig]) -> Vec<String> {
    let mut count: BTreeMap<String, usize> = BTreeMap::new();
    for c in configs {
        *count.entry(c.solver.algorithm.to_string()).or_default() += 1;
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    configs
        .iter()
        .map(|c| {
            let name = c.solver.algorithm.to_string();
            if count[&name] == 1 {
                return name;
            }
            let i = seen.entry(name.clone()).or_default();
            *i += 1;
            format!("{name}_{}_{i}", c.solver.mode())
        })
        .collect()
}

/// Runs several solver configs on one problem and start, in parallel.
pub fn compare_algorithms(configs: &[ExperimentConfig], out_dir: &Path) -> Result<CompareOutcome> {
    let first = configs.first().ok_or_else(|| Error::config("configs", "at least one config is required"))?;
    for (i, c) in configs.iter().enumerate().skip(1) {
        if c.problem != first.problem {
            return Err(Error::config(format!("configs[{i}].problem"), "differs from configs[0].problem"));
        }
        if c.init != first.init {
            return Err(Error::config(format!("configs[{i}].init"), "differs from configs[0].init"));
        }
    }
    let labels = labels(configs);
    let results: Vec<Result<(Trace, ExperimentReport)>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().zip(&labels).map(|(c, l)| s.spawn(move || execute_labelled(c, l))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });

    let mut traces = Vec::with_capacity(configs.len());
    let mut reports = Vec::with_capacity(configs.len());
    let mut runs = Vec::with_capacity(configs.len());
    let mut rate_rows = Vec::new();
    for (label, result) in labels.into_iter().zip(results) {
        let (trace, report) = result?;
        runs.push(CompareEntry {
            label: label.clone(),
            algorithm: report.algorithm.clone(),
            mode: report.mode.clone(),
            termination: trace.termination,
            iterations: trace.iterations(),
            failure: trace.failure.clone(),
        });
        if let Some(r) = &report.rates {
            rate_rows.extend(r.rows.iter().cloned());
        }
        traces.push((label, trace));
        reports.push(report);
    }

    let summary = CompareReport {
        problem: reports[0].problem.clone(),
        runs,
        rates: RateReport { tolerance: RATE_TOLERANCE, rows: rate_rows },
    };
    let borrowed: Vec<(String, &Trace)> = traces.iter().map(|(l, t)| (l.clone(), t)).collect();
    let csv_path = out_dir.join(COMPARE_CSV);
    let report_path = out_dir.join(COMPARE_REPORT);
    write_file(&csv_path, &aligned_csv(&borrowed, csv_format(first)))?;
    write_file(&report_path, &to_json(&summary))?;
    Ok(CompareOutcome { traces, reports, summary, csv_path, report_path })
}
