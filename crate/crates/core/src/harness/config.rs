//! Experiment documents (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [problem]
//! name = "synthetic_quartic"
//! seed = 0
//! params = {}
//!
//! [solver]
//! algorithm = "CN"
//!
//! [init]
//! x0 = [0.02, 0.04]
//! y0 = [0.03, 0.05]
//!
//! [run]
//! max_iter = 10
//! dist_tol = 1e-8
//! ```
//!
//! Defaults: `problem.seed = 0`, `init.mode = "explicit"` (a missing `x0`/`y0`
//! pair means the problem's default start), `init.seed = problem.seed`,
//! `run.max_iter = 1000`, `run.burn_in = 5`, `output.trace_path = "trace.csv"`,
//! `output.report_path = "report.json"`, shortest round-trip floats, no wall
//! time column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{MinimaxOracle, Point};
use crate::problems::make_problem;
use crate::problems::sampling::GaussianStream;
use crate::solvers::{SolverSpec, StopCriteria};

pub const SCHEMA_VERSION: u32 = 1;

/// Longest significant-digit count accepted by `output.float_precision`.
pub const MAX_FLOAT_PRECISION: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub problem: ProblemConfig,
    pub solver: SolverSpec,
    #[serde(default)]
    pub init: InitConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    #[default]
    Explicit,
    SeededGaussian,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    #[serde(default)]
    pub mode: InitMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    /// Standard deviation of the zero-mean Gaussian start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stddev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_tol: Option<f64>,
    /// Leading distances ignored by the empirical rate fit.
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

fn default_max_iter() -> usize {
    1000
}

fn default_burn_in() -> usize {
    5
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { max_iter: default_max_iter(), grad_tol: None, dist_tol: None, burn_in: default_burn_in() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_trace_path")]
    pub trace_path: String,
    #[serde(default = "default_report_path")]
    pub report_path: String,
    /// Significant digits in CSV floats; unset means shortest round-trip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float_precision: Option<usize>,
    /// Fill the `wall_time_s` column. Off by default so traces stay reproducible.
    #[serde(default)]
    pub wall_time: bool,
}

fn default_trace_path() -> String {
    "trace.csv".into()
}

fn default_report_path() -> String {
    "report.json".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { trace_path: default_trace_path(), report_path: default_report_path(), float_precision: None, wall_time: false }
    }
}

/// Parses and fully validates an experiment document.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let value: toml::Table = document.parse().map_err(|e: toml::de::Error| Error::config("<document>", e.message().to_string()))?;
    let config: ExperimentConfig = serde_path_to_error::deserialize(toml::Value::Table(value)).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// A config with defaults everywhere except the essentials.
    pub fn new(problem: &str, solver: SolverSpec, max_iter: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            problem: ProblemConfig { name: problem.into(), seed: 0, params: toml::Table::new() },
            solver,
            init: InitConfig::default(),
            run: RunConfig { max_iter, ..RunConfig::default() },
            output: OutputConfig::default(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<document>", e.to_string()))
    }

    /// Collects every range violation, then checks that the problem can be
    /// built and that an explicit init matches its dimensions.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!("schema_version: unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        errs.extend(self.solver.validate());
        let mut positive = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    errs.push(format!("{key}: must be > 0 (got {v})"));
                }
            }
        };
        positive("run.grad_tol", self.run.grad_tol);
        positive("run.dist_tol", self.run.dist_tol);
        let init = &self.init;
        match init.mode {
            InitMode::Explicit => {
                if init.x0.is_some() != init.y0.is_some() {
                    errs.push("init: x0 and y0 must be given together".into());
                }
                for (key, v) in [("init.x0", &init.x0), ("init.y0", &init.y0)] {
                    if v.as_ref().is_some_and(|v| v.iter().any(|c| !c.is_finite())) {
                        errs.push(format!("{key}: entries must be finite"));
                    }
                }
                if init.stddev.is_some() || init.seed.is_some() {
                    errs.push("init: stddev and seed apply only to mode = \"seeded_gaussian\"".into());
                }
            }
            InitMode::SeededGaussian => {
                match init.stddev {
                    Some(s) if s.is_finite() && s > 0.0 => {}
                    Some(s) => errs.push(format!("init.stddev: must be > 0 (got {s})")),
                    None => errs.push("init.stddev: required for mode = \"seeded_gaussian\"".into()),
                }
                if init.x0.is_some() || init.y0.is_some() {
                    errs.push("init: x0/y0 apply only to mode = \"explicit\"".into());
                }
            }
        }
        if let Some(p) = self.output.float_precision {
            if !(1..=MAX_FLOAT_PRECISION).contains(&p) {
                errs.push(format!("output.float_precision: must be in [1, {MAX_FLOAT_PRECISION}] (got {p})"));
            }
        }
        for (key, path) in [("output.trace_path", &self.output.trace_path), ("output.report_path", &self.output.report_path)] {
            if path.trim().is_empty() {
                errs.push(format!("{key}: must not be empty"));
            }
        }
        match self.build_problem() {
            Ok(oracle) => {
                if let Err(e) = self.initial_point(oracle.as_ref()) {
                    errs.push(range_message(e));
                }
            }
            Err(e) => errs.push(range_message(e)),
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigRanges(errs))
        }
    }

    pub fn build_problem(&self) -> Result<Box<dyn MinimaxOracle>> {
        make_problem(&self.problem.name, &self.problem.params, self.problem.seed)
    }

    pub fn initial_point(&self, oracle: &dyn MinimaxOracle) -> Result<Point> {
        let (n, m) = oracle.dims();
        match self.init.mode {
            InitMode::Explicit => match (&self.init.x0, &self.init.y0) {
                (Some(x0), Some(y0)) => {
                    for (key, v, dim) in [("init.x0", x0, n), ("init.y0", y0, m)] {
                        if v.len() != dim {
                            return Err(Error::config(key, format!("expected {dim} entries for {}, found {}", oracle.name(), v.len())));
                        }
                    }
                    Ok(Point::new(x0.clone(), y0.clone()))
                }
                _ => Ok(oracle.default_start()),
            },
            InitMode::SeededGaussian => {
                let stddev = self.init.stddev.unwrap_or(1.0);
                let mut stream = GaussianStream::new(self.init.seed.unwrap_or(self.problem.seed));
                let x = stream.normal_vec(n, stddev);
                Ok(Point::new(x, stream.normal_vec(m, stddev)))
            }
        }
    }

    pub fn stop_criteria(&self, oracle: &dyn MinimaxOracle) -> StopCriteria {
        let mut stop = StopCriteria::for_oracle(oracle, self.run.max_iter);
        stop.grad_tol = self.run.grad_tol;
        stop.dist_tol = self.run.dist_tol;
        stop
    }
}

fn range_message(e: Error) -> String {
    match e {
        Error::Config { path, message } => format!("{path}: {message}"),
        e => format!("problem: {e}"),
    }
}
