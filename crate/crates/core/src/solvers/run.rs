use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{step, SolverSpec, StepState};
use crate::error::Result;
use crate::linalg::vector::norm;
use crate::oracle::{check_point, MinimaxOracle, Point};

/// Iterates with `‖z‖` above this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradTol,
    DistTol,
    MaxIter,
    NumericalFailure,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::GradTol => "grad_tol",
            Termination::DistTol => "dist_tol",
            Termination::MaxIter => "max_iter",
            Termination::NumericalFailure => "numerical_failure",
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Termination::GradTol | Termination::DistTol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopCriteria {
    pub max_iter: usize,
    /// Stop once both `‖∂x f‖` and `‖∂y f‖` are at most this.
    pub grad_tol: Option<f64>,
    /// Stop once `‖z − z*‖` is at most this (needs `known_solution`).
    pub dist_tol: Option<f64>,
    pub known_solution: Option<Point>,
}

impl StopCriteria {
    pub fn new(max_iter: usize) -> Self {
        Self { max_iter, grad_tol: None, dist_tol: None, known_solution: None }
    }

    /// Uses the oracle's registered solution for distances.
    pub fn for_oracle(oracle: &dyn MinimaxOracle, max_iter: usize) -> Self {
        Self { known_solution: oracle.known_solution(), ..Self::new(max_iter) }
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Self {
        self.grad_tol = Some(tol);
        self
    }

    pub fn with_dist_tol(mut self, tol: f64) -> Self {
        self.dist_tol = Some(tol);
        self
    }

    pub fn with_solution(mut self, z: Point) -> Self {
        self.known_solution = Some(z);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    /// Seconds since the run started (monotonic clock).
    pub wall_time_s: f64,
    pub f: f64,
    pub grad_x_norm: f64,
    pub grad_y_norm: f64,
    pub dist_x: Option<f64>,
    pub dist_y: Option<f64>,
    /// CG iterations spent by the step that produced this row.
    pub cg_iters_x: usize,
    pub cg_iters_y: usize,
    #[serde(skip)]
    pub z: Point,
}

impl TraceRow {
    pub fn grad_norm(&self) -> f64 {
        self.grad_x_norm.max(self.grad_y_norm)
    }

    pub fn distance(&self) -> Option<f64> {
        Some(self.dist_x?.hypot(self.dist_y?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
    /// Error or divergence message when `termination` is a numerical failure.
    pub failure: Option<String>,
    /// Steps where an inner solve looked singular.
    pub near_singular_steps: usize,
}

impl Trace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("a trace always holds the initial row")
    }

    pub fn final_point(&self) -> &Point {
        &self.last().z
    }

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.last().iter
    }

    pub fn distances(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(TraceRow::distance).collect()
    }

    /// First iteration at which `pred` holds.
    pub fn first_iter_where(&self, pred: impl Fn(&TraceRow) -> bool) -> Option<usize> {
        self.rows.iter().find(|r| pred(r)).map(|r| r.iter)
    }
}

fn record(oracle: &dyn MinimaxOracle, z: &Point, iter: usize, start: &Instant, cg: (usize, usize), stop: &StopCriteria) -> TraceRow {
    let (dist_x, dist_y) = match &stop.known_solution {
        Some(s) => {
            let (dx, dy) = z.distances_to(s);
            (Some(dx), Some(dy))
        }
        None => (None, None),
    };
    TraceRow {
        iter,
        wall_time_s: start.elapsed().as_secs_f64(),
        f: oracle.value(z),
        grad_x_norm: norm(&oracle.grad_x(z)),
        grad_y_norm: norm(&oracle.grad_y(z)),
        dist_x,
        dist_y,
        cg_iters_x: cg.0,
        cg_iters_y: cg.1,
        z: z.clone(),
    }
}

fn satisfied(row: &TraceRow, stop: &StopCriteria, dist_floor: f64) -> Option<Termination> {
    if stop.grad_tol.is_some_and(|tol| row.grad_x_norm <= tol && row.grad_y_norm <= tol) {
        return Some(Termination::GradTol);
    }
    if let (Some(tol), Some(d)) = (stop.dist_tol, row.distance()) {
        if d <= tol.max(dist_floor) {
            return Some(Termination::DistTol);
        }
    }
    None
}

/// Iterates the selected step from `z0`, recording a row for `z0` and after
/// every step. Numerical failures end the run with a partial trace rather
/// than an error; only invalid inputs are errors.
pub fn run(oracle: &dyn MinimaxOracle, spec: &SolverSpec, z0: &Point, stop: &StopCriteria) -> Result<Trace> {
    check_point(oracle, z0)?;
    let start = Instant::now();
    let floor = oracle.solution_tolerance_floor();
    let mut state = StepState::new(z0.clone());
    let mut rows = vec![record(oracle, z0, 0, &start, (0, 0), stop)];
    let mut near_singular_steps = 0;

    let finish = |rows, termination, failure, near_singular_steps| Trace { rows, termination, failure, near_singular_steps };

    for iter in 0.. {
        let current = rows.last().expect("non-empty");
        if let Some(reason) = satisfied(current, stop, floor) {
            return Ok(finish(rows, reason, None, near_singular_steps));
        }
        if iter >= stop.max_iter {
            return Ok(finish(rows, Termination::MaxIter, None, near_singular_steps));
        }
        let out = match step(oracle, &state, spec) {
            Ok(out) => out,
            Err(e) => return Ok(finish(rows, Termination::NumericalFailure, Some(e.to_string()), near_singular_steps)),
        };
        near_singular_steps += usize::from(out.near_singular);
        state = out.state;
        rows.push(record(oracle, &state.z, iter + 1, &start, (out.cg_iters_x, out.cg_iters_y), stop));
        let size = state.z.norm();
        if size > DIVERGENCE_NORM {
            let msg = format!("diverged: |z| = {size:e} exceeds {DIVERGENCE_NORM:e}");
            return Ok(finish(rows, Termination::NumericalFailure, Some(msg), near_singular_steps));
        }
    }
    unreachable!("loop returns on max_iter")
}
