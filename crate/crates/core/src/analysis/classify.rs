use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dense_solve, eig_symmetric, vector};
use crate::oracle::{HessianBlocks, MinimaxOracle, Point};

pub const DEFAULT_GRAD_TOL: f64 = 1e-8;
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointClassification {
    pub grad_x_norm: f64,
    pub grad_y_norm: f64,
    /// Ascending eigenvalues of `∂xx f`, `∂yy f` and `D_xx f`.
    pub eig_xx: Vec<f64>,
    pub eig_yy: Vec<f64>,
    /// `None` when `∂yy f` is singular and the total Hessian is undefined.
    pub eig_dxx: Option<Vec<f64>>,
    pub xx_min_eig: f64,
    pub yy_max_eig: f64,
    pub dxx_min_eig: Option<f64>,
    /// Smallest `|λ(∂xx f)|` is within `eig_tol` of zero.
    pub xx_singular: bool,
    pub is_stationary: bool,
    pub is_slmm: bool,
    pub is_strict_local_nash: bool,
    pub grad_tol: f64,
    pub eig_tol: f64,
}

/// Stationarity and second-order tests from densely assembled blocks.
pub fn classify_point(oracle: &dyn MinimaxOracle, z: &Point, grad_tol: f64, eig_tol: f64) -> Result<PointClassification> {
    if !(grad_tol > 0.0 && eig_tol > 0.0) {
        return Err(Error::Precondition("classification tolerances must be positive".into()));
    }
    let blocks = HessianBlocks::assemble(oracle, z)?;
    let grad_x_norm = vector::norm(&oracle.grad_x(z));
    let grad_y_norm = vector::norm(&oracle.grad_y(z));
    let eig_xx = eig_symmetric(&blocks.xx.symmetrized())?;
    let eig_yy = eig_symmetric(&blocks.yy.symmetrized())?;
    let eig_dxx = match blocks.total_xx() {
        Ok(d) => Some(eig_symmetric(&d.symmetrized())?),
        Err(Error::Linalg(crate::linalg::LinalgError::Singular { .. })) => None,
        Err(e) => return Err(e),
    };
    let xx_min_eig = eig_xx.first().copied().unwrap_or(f64::INFINITY);
    let yy_max_eig = eig_yy.last().copied().unwrap_or(f64::NEG_INFINITY);
    let dxx_min_eig = eig_dxx.as_ref().map(|e| e.first().copied().unwrap_or(f64::INFINITY));
    let xx_singular = eig_xx.iter().any(|l| l.abs() <= eig_tol);

    let is_stationary = grad_x_norm <= grad_tol && grad_y_norm <= grad_tol;
    let follower_strict = yy_max_eig <= -eig_tol;
    let is_slmm = is_stationary && follower_strict && dxx_min_eig.is_some_and(|l| l >= eig_tol);
    let is_strict_local_nash = is_stationary && follower_strict && xx_min_eig >= eig_tol;
    Ok(PointClassification {
        grad_x_norm,
        grad_y_norm,
        eig_xx,
        eig_yy,
        eig_dxx,
        xx_min_eig,
        yy_max_eig,
        dxx_min_eig,
        xx_singular,
        is_stationary,
        is_slmm,
        is_strict_local_nash,
        grad_tol,
        eig_tol,
    })
}

/// Full Newton on `∇f = 0` with the dense Hessian. Converges quadratically
/// to whatever nondegenerate stationary point is nearby, minimax or not.
pub fn refine_stationary(oracle: &dyn MinimaxOracle, z0: &Point, tol: f64, max_iter: usize) -> Result<Point> {
    let (n, _) = oracle.dims();
    let mut z = z0.clone();
    for it in 0..=max_iter {
        let mut g = oracle.grad_x(&z);
        g.extend(oracle.grad_y(&z));
        let res = vector::norm(&g);
        if !res.is_finite() {
            return Err(Error::NonFinite("refine_stationary gradient"));
        }
        if res <= tol {
            return Ok(z);
        }
        if it == max_iter {
            return Err(Error::NoConvergence { iterations: it, residual: res, last: z.to_flat() });
        }
        let h = HessianBlocks::assemble(oracle, &z)?.full();
        let step = dense_solve(&h, &g)?;
        let mut flat = z.to_flat();
        vector::axpy(-1.0, &step, &mut flat);
        z = Point::from_flat(&flat, n);
    }
    unreachable!()
}
