use super::{Algorithm, Mode, SolverSpec, StepOutput, StepState};
use crate::error::{Error, Result};
use crate::linalg::vector::{self, axpy};
use crate::oracle::{self, check_point, MinimaxOracle, Point};

fn finite(v: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if vector::is_finite(&v) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn grad_x(oracle: &dyn MinimaxOracle, z: &Point) -> Result<Vec<f64>> {
    finite(oracle.grad_x(z), "leader gradient")
}

fn grad_y(oracle: &dyn MinimaxOracle, z: &Point) -> Result<Vec<f64>> {
    finite(oracle.grad_y(z), "follower gradient")
}

/// Point at which the follower rule is evaluated.
fn follower_point(mode: Mode, z: &Point, x_new: &[f64]) -> Point {
    match mode {
        Mode::Simultaneous => z.clone(),
        Mode::Alternating => Point::new(x_new.to_vec(), z.y.clone()),
    }
}

fn output(state: &StepState, x: Vec<f64>, y: Vec<f64>, cg_x: usize, cg_y: usize, near_singular: bool) -> StepOutput {
    StepOutput {
        state: StepState { z: Point::new(x, y), z_prev: state.z.clone() },
        cg_iters_x: cg_x,
        cg_iters_y: cg_y,
        near_singular,
    }
}

/// `x − α ∂x f(x, y)`
fn leader_gd(oracle: &dyn MinimaxOracle, z: &Point, alpha: f64) -> Result<Vec<f64>> {
    let mut x = z.x.clone();
    axpy(-alpha, &grad_x(oracle, z)?, &mut x);
    Ok(x)
}

/// `y − γ (∂yy − λI)⁻¹ ∂y f` at `at`, returning the new `y` and CG work.
fn follower_newton(oracle: &dyn MinimaxOracle, at: &Point, spec: &SolverSpec) -> Result<(Vec<f64>, usize, bool)> {
    let gy = grad_y(oracle, at)?;
    let d = oracle::solve_yy(oracle, at, &gy, spec.lambda_y, &spec.cg)?;
    let mut y = at.y.clone();
    axpy(-spec.gamma_y, &finite(d.direction, "follower Newton direction")?, &mut y);
    Ok((y, d.cg.iterations, d.near_singular))
}

/// `y' = y + α_F ∂y f(x̃, y)`, `x' = x − α_L ∂x f(x, y)`.
pub fn step_gda(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let x = leader_gd(oracle, z, spec.alpha_l)?;
    let at = follower_point(spec.mode(), z, &x);
    let mut y = z.y.clone();
    axpy(spec.alpha_f, &grad_y(oracle, &at)?, &mut y);
    Ok(output(state, x, y, 0, 0, false))
}

/// One leader step, then `k` follower ascent steps at the new leader
/// (the old leader in simultaneous mode).
pub fn step_gda_k(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let x = leader_gd(oracle, z, spec.alpha_l)?;
    let mut at = follower_point(spec.mode(), z, &x);
    for _ in 0..spec.k.max(1) {
        let g = grad_y(oracle, &at)?;
        axpy(spec.alpha_f, &g, &mut at.y);
    }
    Ok(output(state, x, at.y, 0, 0, false))
}

/// `x' = x − α_L D_x f(x, y)`, follower ascent.
pub fn step_tgda(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let total = oracle::total_grad_x(oracle, z, &spec.cg)?;
    let mut x = z.x.clone();
    axpy(-spec.alpha_l, &finite(total.gradient, "total gradient")?, &mut x);
    let at = follower_point(spec.mode(), z, &x);
    let mut y = z.y.clone();
    axpy(spec.alpha_f, &grad_y(oracle, &at)?, &mut y);
    Ok(output(state, x, y, total.inner.iterations, 0, total.near_singular))
}

/// `x' = x − α_L ∂x f`, `y' = y + α_F ∂y f + α_L ∂yy⁻¹ ∂yx ∂x f`, follower
/// terms evaluated at `(x̃, y)`.
pub fn step_fr(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let x = leader_gd(oracle, z, spec.alpha_l)?;
    let at = follower_point(spec.mode(), z, &x);
    let gx = grad_x(oracle, &at)?;
    let rhs = oracle.hvp_yx(&at, &gx);
    let ridge = oracle::solve_yy(oracle, &at, &rhs, 0.0, &spec.cg)?;
    let mut y = z.y.clone();
    axpy(spec.alpha_f, &grad_y(oracle, &at)?, &mut y);
    axpy(spec.alpha_l, &finite(ridge.direction, "ridge correction")?, &mut y);
    Ok(output(state, x, y, 0, ridge.cg.iterations, ridge.near_singular))
}

/// Leader gradient descent, damped and regularized follower Newton.
pub fn step_gdn(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let x = leader_gd(oracle, z, spec.alpha_l)?;
    let (y, cg_y, sing) = follower_newton(oracle, &follower_point(spec.mode(), z, &x), spec)?;
    Ok(output(state, x, y, 0, cg_y, sing))
}

/// `x' = x − γ_x (D_xx + λ_x I)⁻¹ ∂x f`, follower Newton.
pub fn step_cn(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let d = oracle::xx_total_newton_direction(oracle, z, spec.lambda_x, &spec.cg)?;
    let mut x = z.x.clone();
    axpy(-spec.gamma_x, &finite(d.direction, "leader Newton direction")?, &mut x);
    let (y, cg_y, sing) = follower_newton(oracle, &follower_point(spec.mode(), z, &x), spec)?;
    Ok(output(state, x, y, d.cg.iterations, cg_y, d.near_singular || sing))
}

/// `x' = x − α ∂x f + β (x − x_prev)`, follower Newton.
pub fn step_gdn_momentum(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let mut x = leader_gd(oracle, z, spec.alpha_l)?;
    if spec.beta != 0.0 {
        axpy(spec.beta, &vector::sub(&z.x, &state.z_prev.x), &mut x);
    }
    let (y, cg_y, sing) = follower_newton(oracle, &follower_point(spec.mode(), z, &x), spec)?;
    Ok(output(state, x, y, 0, cg_y, sing))
}

/// `x' = x − α_L D_x f`, follower Newton.
pub fn step_tgd_newton(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let total = oracle::total_grad_x(oracle, z, &spec.cg)?;
    let mut x = z.x.clone();
    axpy(-spec.alpha_l, &finite(total.gradient, "total gradient")?, &mut x);
    let (y, cg_y, sing) = follower_newton(oracle, &follower_point(spec.mode(), z, &x), spec)?;
    Ok(output(state, x, y, total.inner.iterations, cg_y, total.near_singular || sing))
}

fn total_newton_leader(oracle: &dyn MinimaxOracle, z: &Point, spec: &SolverSpec) -> Result<(Vec<f64>, usize, bool)> {
    let d = oracle::xx_total_newton_of_total_gradient(oracle, z, spec.lambda_x, &spec.cg)?;
    let mut x = z.x.clone();
    axpy(-spec.gamma_x, &finite(d.direction, "leader Newton direction")?, &mut x);
    Ok((x, d.cg.iterations, d.near_singular))
}

/// `x' = x − (D_xx)⁻¹ D_x f`, follower Newton.
pub fn step_cn_total(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let (x, cg_x, sx) = total_newton_leader(oracle, z, spec)?;
    let (y, cg_y, sy) = follower_newton(oracle, &follower_point(spec.mode(), z, &x), spec)?;
    Ok(output(state, x, y, cg_x, cg_y, sx || sy))
}

/// `x' = x − D_xx⁻¹ D_x f`, `y' = y − ∂yy⁻¹ [∂y f + ∂yx (x' − x)]` at `(x, y)`.
///
/// The correction term linearizes `∂y f(x', y)`; in alternating mode the
/// exact follower gradient at `x'` is used instead and the step coincides
/// with [`step_cn_total`].
pub fn step_evtushenko(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    let z = &state.z;
    let (x, cg_x, sx) = total_newton_leader(oracle, z, spec)?;
    if spec.mode() == Mode::Alternating {
        let (y, cg_y, sy) = follower_newton(oracle, &follower_point(Mode::Alternating, z, &x), spec)?;
        return Ok(output(state, x, y, cg_x, cg_y, sx || sy));
    }
    let mut rhs = grad_y(oracle, z)?;
    axpy(1.0, &oracle.hvp_yx(z, &vector::sub(&x, &z.x)), &mut rhs);
    let d = oracle::solve_yy(oracle, z, &rhs, spec.lambda_y, &spec.cg)?;
    let mut y = z.y.clone();
    axpy(-spec.gamma_y, &finite(d.direction, "follower Newton direction")?, &mut y);
    Ok(output(state, x, y, cg_x, d.cg.iterations, sx || d.near_singular))
}

/// Dispatches on `spec.algorithm`.
pub fn step(oracle: &dyn MinimaxOracle, state: &StepState, spec: &SolverSpec) -> Result<StepOutput> {
    check_point(oracle, &state.z)?;
    let out = match spec.algorithm {
        Algorithm::Gda => step_gda(oracle, state, spec),
        Algorithm::GdaK => step_gda_k(oracle, state, spec),
        Algorithm::Tgda => step_tgda(oracle, state, spec),
        Algorithm::Fr => step_fr(oracle, state, spec),
        Algorithm::Gdn => step_gdn(oracle, state, spec),
        Algorithm::Cn => step_cn(oracle, state, spec),
        Algorithm::GdnMomentum => step_gdn_momentum(oracle, state, spec),
        Algorithm::TgdNewton => step_tgd_newton(oracle, state, spec),
        Algorithm::CnTotal => step_cn_total(oracle, state, spec),
        Algorithm::EvtushenkoCn => step_evtushenko(oracle, state, spec),
    }?;
    if !out.state.z.is_finite() {
        return Err(Error::NonFinite("iterate"));
    }
    Ok(out)
}
