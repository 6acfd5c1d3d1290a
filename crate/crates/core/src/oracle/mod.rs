//! The problem interface seen by every solver, plus the derivative machinery
//! built on top of it: total gradients, Newton directions, best responses and
//! finite-difference validation.
//!
//! Solvers never see a dense Hessian. Everything second order goes through the
//! four Hessian-vector products of [`MinimaxOracle`], and every inverse is a
//! budget-limited least-squares CG solve.

mod check;
mod point;

pub use check::{check_derivatives, sample_points, DerivativeReport, FD_STEP};
pub use point::Point;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cg_normal_solve, vector, CgResult, Matrix, SymmetricOperator};

/// Smooth objective `f(x, y)` minimized over the leader `x ∈ Rⁿ` and
/// maximized over the follower `y ∈ Rᵐ`.
///
/// Implementations must be re-entrant: queries never mutate problem data.
pub trait MinimaxOracle: Send + Sync {
    fn name(&self) -> &str;
    /// `(n, m)`
    fn dims(&self) -> (usize, usize);
    fn value(&self, z: &Point) -> f64;
    fn grad_x(&self, z: &Point) -> Vec<f64>;
    fn grad_y(&self, z: &Point) -> Vec<f64>;
    /// `∂xx f · v`, `v ∈ Rⁿ`
    fn hvp_xx(&self, z: &Point, v: &[f64]) -> Vec<f64>;
    /// `∂xy f · v`, `v ∈ Rᵐ`, result in `Rⁿ`
    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64>;
    /// `∂yx f · u`, `u ∈ Rⁿ`, result in `Rᵐ`
    fn hvp_yx(&self, z: &Point, u: &[f64]) -> Vec<f64>;
    /// `∂yy f · v`, `v ∈ Rᵐ`
    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64>;

    /// Reference strict local minimax point, when one is known in closed form.
    fn known_solution(&self) -> Option<Point> {
        None
    }

    /// Lower bound applied to distance-based stopping against
    /// `known_solution`, for references that are only approximate (e.g. a
    /// population optimum of a sampled objective).
    fn solution_tolerance_floor(&self) -> f64 {
        0.0
    }

    /// Starting point used when an experiment gives no explicit init.
    fn default_start(&self) -> Point {
        let (n, m) = self.dims();
        Point::new(vec![1.0; n], vec![1.0; m])
    }

    /// Other labelled stationary points worth reporting (e.g. local minima
    /// that attract Newton-type schemes).
    fn landmarks(&self) -> Vec<(&'static str, Point)> {
        self.known_solution().map(|p| vec![("slmm", p)]).unwrap_or_default()
    }
}

impl std::fmt::Debug for dyn MinimaxOracle + '_ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (n, m) = self.dims();
        write!(f, "{}(n={n}, m={m})", self.name())
    }
}

/// Iteration caps for the inner CG solves. `max_iter_x` bounds solves of
/// leader-side (augmented) systems, `max_iter_y` bounds `∂yy` solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CgBudget {
    pub max_iter_x: usize,
    pub max_iter_y: usize,
    pub tol: f64,
}

impl Default for CgBudget {
    fn default() -> Self {
        Self { max_iter_x: 32, max_iter_y: 32, tol: 0.0 }
    }
}

impl CgBudget {
    pub fn new(max_iter_x: usize, max_iter_y: usize, tol: f64) -> Self {
        Self { max_iter_x, max_iter_y, tol }
    }
}

/// Result of an inner Newton-type solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonDirection {
    pub direction: Vec<f64>,
    /// Raw CG output. For augmented solves `cg.solution` has length `n + m`.
    pub cg: CgResult,
    /// Solution norm exceeded `1e8·‖rhs‖`: the system is (nearly) singular.
    pub near_singular: bool,
}

/// `D_x f = ∂x f − ∂xy·∂yy⁻¹·∂y f` together with its inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalGradient {
    pub gradient: Vec<f64>,
    /// Solve of `∂yy u = ∂y f`.
    pub inner: CgResult,
    pub near_singular: bool,
}

pub(crate) fn check_point(oracle: &dyn MinimaxOracle, z: &Point) -> Result<()> {
    let (n, m) = oracle.dims();
    if z.x.len() != n {
        return Err(Error::Dimension { what: "leader x", expected: n, found: z.x.len() });
    }
    if z.y.len() != m {
        return Err(Error::Dimension { what: "follower y", expected: m, found: z.y.len() });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    Ok(())
}

/// Solves `(∂yy f − shift·I) u = rhs` by CG on the normal equations.
pub fn solve_yy(
    oracle: &dyn MinimaxOracle,
    z: &Point,
    rhs: &[f64],
    shift: f64,
    budget: &CgBudget,
) -> Result<NewtonDirection> {
    let (_, m) = oracle.dims();
    if rhs.len() != m {
        return Err(Error::Dimension { what: "follower rhs", expected: m, found: rhs.len() });
    }
    let op = SymmetricOperator::new(m, |v: &[f64]| {
        let mut out = oracle.hvp_yy(z, v);
        if shift != 0.0 {
            vector::axpy(-shift, v, &mut out);
        }
        out
    });
    let cg = cg_normal_solve(&op, rhs, budget.max_iter_y, budget.tol)?;
    let near_singular = cg.suspect_singular(vector::norm(rhs));
    Ok(NewtonDirection { direction: cg.solution.clone(), cg, near_singular })
}

/// `D_x f(z)` with `u = ∂yy⁻¹ ∂y f` computed by one inner CG solve.
pub fn total_grad_x(oracle: &dyn MinimaxOracle, z: &Point, budget: &CgBudget) -> Result<TotalGradient> {
    check_point(oracle, z)?;
    let gy = oracle.grad_y(z);
    let solve = solve_yy(oracle, z, &gy, 0.0, budget)?;
    let mut gradient = oracle.grad_x(z);
    let correction = oracle.hvp_xy(z, &solve.direction);
    vector::axpy(-1.0, &correction, &mut gradient);
    Ok(TotalGradient { gradient, inner: solve.cg, near_singular: solve.near_singular })
}

/// Follower Newton direction `Δy = ∂yy⁻¹ ∂y f`; `y − Δy` is the Newton update.
pub fn yy_newton_direction(oracle: &dyn MinimaxOracle, z: &Point, budget: &CgBudget) -> Result<NewtonDirection> {
    yy_newton_direction_regularized(oracle, z, 0.0, budget)
}

/// `Δy = (∂yy − λI)⁻¹ ∂y f`. For `∂yy ≺ 0` the shift moves the spectrum
/// further from zero; large `λ` turns the step into scaled gradient ascent.
pub fn yy_newton_direction_regularized(
    oracle: &dyn MinimaxOracle,
    z: &Point,
    lambda: f64,
    budget: &CgBudget,
) -> Result<NewtonDirection> {
    check_point(oracle, z)?;
    let gy = oracle.grad_y(z);
    solve_yy(oracle, z, &gy, lambda, budget)
}

/// Solves the augmented system
///
/// ```text
/// [ ∂xx + λI   ∂xy ] [ Δx ]   [ rhs_x ]
/// [ ∂yx        ∂yy ] [ Δv ] = [ rhs_y ]
/// ```
///
/// and returns `Δx = (D_xx + λI)⁻¹ (rhs_x − ∂xy ∂yy⁻¹ rhs_y)`. No nested inner
/// solve is needed: the upper-left block of the inverse is the inverse Schur
/// complement.
pub fn solve_augmented_x(
    oracle: &dyn MinimaxOracle,
    z: &Point,
    rhs_x: &[f64],
    rhs_y: &[f64],
    lambda: f64,
    budget: &CgBudget,
) -> Result<NewtonDirection> {
    let (n, m) = oracle.dims();
    if rhs_x.len() != n || rhs_y.len() != m {
        return Err(Error::Dimension { what: "augmented rhs", expected: n + m, found: rhs_x.len() + rhs_y.len() });
    }
    let op = SymmetricOperator::new(n + m, |w: &[f64]| {
        let (u, v) = w.split_at(n);
        let mut top = oracle.hvp_xx(z, u);
        if lambda != 0.0 {
            vector::axpy(lambda, u, &mut top);
        }
        vector::axpy(1.0, &oracle.hvp_xy(z, v), &mut top);
        let mut bottom = oracle.hvp_yx(z, u);
        vector::axpy(1.0, &oracle.hvp_yy(z, v), &mut bottom);
        top.extend(bottom);
        top
    });
    let mut rhs = rhs_x.to_vec();
    rhs.extend_from_slice(rhs_y);
    let cg = cg_normal_solve(&op, &rhs, budget.max_iter_x, budget.tol)?;
    let near_singular = cg.suspect_singular(vector::norm(&rhs));
    Ok(NewtonDirection { direction: cg.solution[..n].to_vec(), cg, near_singular })
}

/// Leader Newton direction `Δx = (D_xx + λI)⁻¹ ∂x f` via the augmented system.
pub fn xx_total_newton_direction(
    oracle: &dyn MinimaxOracle,
    z: &Point,
    lambda: f64,
    budget: &CgBudget,
) -> Result<NewtonDirection> {
    check_point(oracle, z)?;
    let gx = oracle.grad_x(z);
    let zeros = vec![0.0; z.y.len()];
    solve_augmented_x(oracle, z, &gx, &zeros, lambda, budget)
}

/// `Δx = (D_xx + λI)⁻¹ D_x f`, obtained from the same augmented system with
/// right-hand side `[∂x f; ∂y f]`.
pub fn xx_total_newton_of_total_gradient(
    oracle: &dyn MinimaxOracle,
    z: &Point,
    lambda: f64,
    budget: &CgBudget,
) -> Result<NewtonDirection> {
    check_point(oracle, z)?;
    let gx = oracle.grad_x(z);
    let gy = oracle.grad_y(z);
    solve_augmented_x(oracle, z, &gx, &gy, lambda, budget)
}

/// Matrix-free `D_xx f · v = ∂xx v − ∂xy ∂yy⁻¹ ∂yx v`, one inner solve per call.
pub fn total_hvp_xx(oracle: &dyn MinimaxOracle, z: &Point, v: &[f64], budget: &CgBudget) -> Result<Vec<f64>> {
    check_point(oracle, z)?;
    let (n, _) = oracle.dims();
    if v.len() != n {
        return Err(Error::Dimension { what: "leader direction", expected: n, found: v.len() });
    }
    let w = oracle.hvp_yx(z, v);
    let solve = solve_yy(oracle, z, &w, 0.0, budget)?;
    let mut out = oracle.hvp_xx(z, v);
    vector::axpy(-1.0, &oracle.hvp_xy(z, &solve.direction), &mut out);
    Ok(out)
}

/// Solves `∂y f(x, y) = 0` by undamped Newton in `y` starting from `y0`.
pub fn best_response(
    oracle: &dyn MinimaxOracle,
    x: &[f64],
    y0: &[f64],
    tol: f64,
    max_iter: usize,
    budget: &CgBudget,
) -> Result<Vec<f64>> {
    let mut z = Point::new(x.to_vec(), y0.to_vec());
    check_point(oracle, &z)?;
    let mut iterations = 0;
    loop {
        let gy = oracle.grad_y(&z);
        let residual = vector::norm(&gy);
        if !residual.is_finite() {
            return Err(Error::NonFinite("best_response gradient"));
        }
        if residual <= tol {
            return Ok(z.y);
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, residual, last: z.y });
        }
        let step = solve_yy(oracle, &z, &gy, 0.0, budget)?;
        vector::axpy(-1.0, &step.direction, &mut z.y);
        iterations += 1;
    }
}

/// Densely assembled second-order blocks at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianBlocks {
    pub xx: Matrix,
    pub xy: Matrix,
    pub yx: Matrix,
    pub yy: Matrix,
}

impl HessianBlocks {
    /// Applies each HVP to the standard basis.
    pub fn assemble(oracle: &dyn MinimaxOracle, z: &Point) -> Result<Self> {
        check_point(oracle, z)?;
        let (n, m) = oracle.dims();
        Ok(Self {
            xx: Matrix::from_columns_of(n, n, |e| oracle.hvp_xx(z, e)),
            xy: Matrix::from_columns_of(n, m, |e| oracle.hvp_xy(z, e)),
            yx: Matrix::from_columns_of(m, n, |e| oracle.hvp_yx(z, e)),
            yy: Matrix::from_columns_of(m, m, |e| oracle.hvp_yy(z, e)),
        })
    }

    /// Full Hessian `[∂xx ∂xy; ∂yx ∂yy]`.
    pub fn full(&self) -> Matrix {
        Matrix::from_blocks(&self.xx, &self.xy, &self.yx, &self.yy).expect("blocks assembled with consistent shapes")
    }

    /// Schur complement `D_xx = ∂xx − ∂xy ∂yy⁻¹ ∂yx` by dense elimination.
    pub fn total_xx(&self) -> Result<Matrix> {
        let lu = linalg::Lu::factorize(&self.yy, "d_yy f")?;
        let yy_inv_yx = lu.solve_matrix(&self.yx)?;
        Ok(self.xx.sub(&self.xy.matmul(&yy_inv_yx)))
    }
}
