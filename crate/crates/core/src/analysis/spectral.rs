use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_symmetric, sorted_moduli, spectral_radius, vector, Lu, Matrix};
use crate::oracle::{HessianBlocks, MinimaxOracle, Point};
use crate::solvers::{step, Algorithm, SolverSpec, StepState};

/// FD step for the Jacobians of quadratic problems, where the map is affine.
pub const FD_STEP_LINEAR: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;

/// `z*` must satisfy `‖T(z*) − z*‖` at most this for rate analysis.
pub const FIXED_POINT_TOL: f64 = 1e-8;

/// Stationarity required by the closed-form rate formulas.
pub const STATIONARY_TOL: f64 = 1e-6;

fn momentum_state(spec: &SolverSpec) -> bool {
    spec.algorithm == Algorithm::GdnMomentum && spec.beta != 0.0
}

/// State dimension seen by the FD Jacobian: `n + m`, doubled for momentum
/// (the previous iterate is part of the state).
pub fn state_dim(oracle: &dyn MinimaxOracle, spec: &SolverSpec) -> usize {
    let (n, m) = oracle.dims();
    if momentum_state(spec) {
        2 * (n + m)
    } else {
        n + m
    }
}

fn apply_map(oracle: &dyn MinimaxOracle, spec: &SolverSpec, flat: &[f64]) -> Result<Vec<f64>> {
    let (n, m) = oracle.dims();
    let state = if momentum_state(spec) {
        StepState { z: Point::from_flat(&flat[..n + m], n), z_prev: Point::from_flat(&flat[n + m..], n) }
    } else {
        StepState::new(Point::from_flat(flat, n))
    };
    let out = step(oracle, &state, spec)?.state;
    let mut v = out.z.to_flat();
    if momentum_state(spec) {
        v.extend(state.z.to_flat());
    }
    Ok(v)
}

fn fixed_point_flat(spec: &SolverSpec, z: &Point) -> Vec<f64> {
    let mut flat = z.to_flat();
    if momentum_state(spec) {
        flat.extend(z.to_flat());
    }
    flat
}

/// Central-difference Jacobian of the one-step map at `z` (with
/// `z_prev = z` for momentum).
///
/// Differences at `h` and `h/2` are Richardson-combined, which cancels the
/// `O(h²)` truncation term. This matters for the Newton family: their
/// Jacobians are nilpotent, and a perturbation `E` of a nilpotent block
/// moves its eigenvalues by `O(‖E‖^½)`.
pub fn step_jacobian_fd(oracle: &dyn MinimaxOracle, spec: &SolverSpec, z: &Point, h: f64) -> Result<Matrix> {
    if !(h > 0.0) {
        return Err(Error::Precondition("finite-difference step must be positive".into()));
    }
    let base = fixed_point_flat(spec, z);
    let dim = base.len();
    let central = |j: usize, s: f64| -> Result<Vec<f64>> {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += s;
        minus[j] -= s;
        let tp = apply_map(oracle, spec, &plus)?;
        let tm = apply_map(oracle, spec, &minus)?;
        Ok(tp.iter().zip(&tm).map(|(a, b)| (a - b) / (2.0 * s)).collect())
    };
    let mut jac = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let coarse = central(j, h)?;
        let fine = central(j, 0.5 * h)?;
        for i in 0..dim {
            jac[(i, j)] = (4.0 * fine[i] - coarse[i]) / 3.0;
        }
    }
    Ok(jac)
}

/// `‖T(z) − z‖` for the selected step.
pub fn fixed_point_residual(oracle: &dyn MinimaxOracle, spec: &SolverSpec, z: &Point) -> Result<f64> {
    let base = fixed_point_flat(spec, z);
    Ok(vector::norm(&vector::sub(&apply_map(oracle, spec, &base)?, &base)))
}

/// Spectral radius of the FD Jacobian at a fixed point.
pub fn asymptotic_rate(oracle: &dyn MinimaxOracle, spec: &SolverSpec, z_star: &Point, h: f64) -> Result<f64> {
    let res = fixed_point_residual(oracle, spec, z_star)?;
    if res > FIXED_POINT_TOL {
        return Err(Error::Precondition(format!("not a fixed point of {}: |T(z) - z| = {res:e}", spec.algorithm)));
    }
    Ok(spectral_radius(&step_jacobian_fd(oracle, spec, z_star, h)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumConstants {
    pub alpha: f64,
    pub beta: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eig_xx: Vec<f64>,
    pub eig_yy: Vec<f64>,
    pub eig_dxx: Vec<f64>,
    /// Largest and smallest eigenvalues of `D_xx f` (`λ₁ ≥ λₙ`).
    pub lambda_1: f64,
    pub lambda_n: f64,
    /// Largest and smallest eigenvalues of `−∂yy f` (`μ₁ ≥ μₘ`).
    pub mu_1: f64,
    pub mu_m: f64,
    pub kappa_l: f64,
    pub kappa_f: f64,
    pub alpha_l: f64,
    pub alpha_f: f64,
    /// `|1 − α_L λₙ| ∨ |1 − α_L λ₁|`
    pub rho_l: f64,
    /// `|1 − α_F μ₁| ∨ |1 − α_F μₘ|`
    pub rho_f: f64,
    /// `2 / (λ₁ + λₙ)` and the resulting `(κ_L − 1)/(κ_L + 1)`.
    pub alpha_l_opt: f64,
    pub rho_l_opt: f64,
    /// GDA-∞ converges at rate `ρ_L` when `α < 2/μ₁`.
    pub gda_inf_alpha_bound: f64,
    /// `1 − 2λₙ/μ₁`, available when `μ₁ ≥ λ₁ + λₙ`.
    pub gda_inf_suboptimal_rate: Option<f64>,
    pub momentum: MomentumConstants,
    /// FD Jacobian spectral radius per algorithm label, when computed.
    pub jacobian_spectral_radius: BTreeMap<String, f64>,
}

impl SpectralReport {
    /// Closed-form asymptotic rate for `spec`, where one applies: `ρ_L ∨ ρ_F`
    /// for simultaneous TGDA/FR, `ρ_L` for alternating GDN and TGD-Newton,
    /// `0` for the CN family, and the momentum rate at the theorem's
    /// constants.
    pub fn predicted_rate(&self, spec: &SolverSpec) -> Option<f64> {
        use crate::solvers::Mode::*;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        match (spec.algorithm, spec.mode()) {
            (Algorithm::Tgda | Algorithm::Fr, Simultaneous) => Some(self.rho_l_at(spec.alpha_l).max(self.rho_f_at(spec.alpha_f))),
            (Algorithm::Gdn, Alternating) | (Algorithm::TgdNewton, _) => Some(self.rho_l_at(spec.alpha_l)),
            (Algorithm::GdnMomentum, Alternating) if spec.beta == 0.0 => Some(self.rho_l_at(spec.alpha_l)),
            (Algorithm::GdnMomentum, Alternating)
                if close(spec.alpha_l, self.momentum.alpha) && close(spec.beta, self.momentum.beta) =>
            {
                Some(self.momentum.rate)
            }
            (Algorithm::Cn | Algorithm::CnTotal | Algorithm::EvtushenkoCn, _) => Some(0.0),
            _ => None,
        }
    }

    pub fn rho_l_at(&self, alpha: f64) -> f64 {
        (1.0 - alpha * self.lambda_n).abs().max((1.0 - alpha * self.lambda_1).abs())
    }

    pub fn rho_f_at(&self, alpha: f64) -> f64 {
        (1.0 - alpha * self.mu_1).abs().max((1.0 - alpha * self.mu_m).abs())
    }
}

fn check_stationary(oracle: &dyn MinimaxOracle, z: &Point) -> Result<()> {
    let g = vector::norm(&oracle.grad_x(z)).max(vector::norm(&oracle.grad_y(z)));
    if !(g <= STATIONARY_TOL) {
        return Err(Error::Precondition(format!("point is not stationary: gradient norm {g:e}")));
    }
    Ok(())
}

/// Eigen-data of the second-order blocks at a stationary point and every
/// closed-form rate derived from them.
pub fn theoretical_rates(oracle: &dyn MinimaxOracle, z_star: &Point, alpha_l: f64, alpha_f: f64) -> Result<SpectralReport> {
    check_stationary(oracle, z_star)?;
    let blocks = HessianBlocks::assemble(oracle, z_star)?;
    let eig_xx = eig_symmetric(&blocks.xx.symmetrized())?;
    let eig_yy = eig_symmetric(&blocks.yy.symmetrized())?;
    let eig_dxx = eig_symmetric(&blocks.total_xx()?.symmetrized())?;
    let lambda_n = eig_dxx[0];
    let lambda_1 = *eig_dxx.last().expect("n >= 1");
    let mu_1 = -eig_yy[0];
    let mu_m = -*eig_yy.last().expect("m >= 1");
    if !(lambda_n > 0.0 && mu_m > 0.0) {
        return Err(Error::Analysis(format!(
            "rate formulas need D_xx > 0 and d_yy < 0 (got min eig D_xx {lambda_n:e}, max eig d_yy {:e})",
            -mu_m
        )));
    }
    let kappa_l = lambda_1 / lambda_n;
    let kappa_f = mu_1 / mu_m;
    let sq = kappa_l.sqrt();
    let momentum = MomentumConstants {
        alpha: 4.0 / (lambda_1.sqrt() + lambda_n.sqrt()).powi(2),
        beta: ((sq - 1.0) / (sq + 1.0)).powi(2),
        rate: 1.0 - 2.0 / (sq + 1.0),
    };
    let mut report = SpectralReport {
        eig_xx,
        eig_yy,
        eig_dxx,
        lambda_1,
        lambda_n,
        mu_1,
        mu_m,
        kappa_l,
        kappa_f,
        alpha_l,
        alpha_f,
        rho_l: 0.0,
        rho_f: 0.0,
        alpha_l_opt: 2.0 / (lambda_1 + lambda_n),
        rho_l_opt: (kappa_l - 1.0) / (kappa_l + 1.0),
        gda_inf_alpha_bound: 2.0 / mu_1,
        gda_inf_suboptimal_rate: (mu_1 >= lambda_1 + lambda_n).then(|| 1.0 - 2.0 * lambda_n / mu_1),
        momentum,
        jacobian_spectral_radius: BTreeMap::new(),
    };
    report.rho_l = report.rho_l_at(alpha_l);
    report.rho_f = report.rho_f_at(alpha_f);
    Ok(report)
}

/// Adds the FD Jacobian spectral radius of each spec, keyed `ALG/mode`.
pub fn add_jacobian_radii(report: &mut SpectralReport, oracle: &dyn MinimaxOracle, z_star: &Point, specs: &[SolverSpec], h: f64) -> Result<()> {
    for spec in specs {
        let key = format!("{}/{}", spec.algorithm, spec.mode());
        report.jacobian_spectral_radius.insert(key, asymptotic_rate(oracle, spec, z_star, h)?);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransposeReport {
    /// Sorted eigenvalue moduli of `I + P H` (TGDA) and `I + Pᵀ H` (FR).
    pub tgda_moduli: Vec<f64>,
    pub fr_moduli: Vec<f64>,
    pub max_modulus_gap: f64,
    /// The same spectra from FD Jacobians of the actual step implementations.
    pub fd_tgda_moduli: Vec<f64>,
    pub fd_fr_moduli: Vec<f64>,
    /// Largest gap between the dense and FD spectra.
    pub max_fd_gap: f64,
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Preconditioner `P = [[−α_L I, α_L ∂xy ∂yy⁻¹], [0, α_F I]]`: TGDA is
/// `z + P ∂z f` and FR is `z + Pᵀ ∂z f`.
pub fn preconditioner(blocks: &HessianBlocks, alpha_l: f64, alpha_f: f64) -> Result<Matrix> {
    let (n, m) = (blocks.xx.rows(), blocks.yy.rows());
    let yy_inv = Lu::factorize(&blocks.yy, "d_yy f")?.inverse();
    Ok(Matrix::from_blocks(
        &Matrix::identity(n).scale(-alpha_l),
        &blocks.xy.matmul(&yy_inv).scale(alpha_l),
        &Matrix::zeros(m, n),
        &Matrix::identity(m).scale(alpha_f),
    )?)
}

/// Compares the spectra of the TGDA and FR Jacobians at a stationary point,
/// both densely (`I + PH` vs `I + PᵀH`) and through FD Jacobians.
pub fn verify_transpose_relation(oracle: &dyn MinimaxOracle, z_star: &Point, alpha_l: f64, alpha_f: f64, h: f64) -> Result<TransposeReport> {
    check_stationary(oracle, z_star)?;
    let blocks = HessianBlocks::assemble(oracle, z_star)?;
    let hess = blocks.full();
    let p = preconditioner(&blocks, alpha_l, alpha_f)?;
    let eye = Matrix::identity(hess.rows());
    let tgda_moduli = sorted_moduli(&eye.add(&p.matmul(&hess)))?;
    let fr_moduli = sorted_moduli(&eye.add(&p.transpose().matmul(&hess)))?;
    let simultaneous = |alg| SolverSpec::new(alg).with_steps(alpha_l, alpha_f).with_mode(crate::solvers::Mode::Simultaneous);
    let fd_tgda_moduli = sorted_moduli(&step_jacobian_fd(oracle, &simultaneous(Algorithm::Tgda), z_star, h)?)?;
    let fd_fr_moduli = sorted_moduli(&step_jacobian_fd(oracle, &simultaneous(Algorithm::Fr), z_star, h)?)?;
    Ok(TransposeReport {
        max_modulus_gap: max_gap(&tgda_moduli, &fr_moduli),
        max_fd_gap: max_gap(&tgda_moduli, &fd_tgda_moduli).max(max_gap(&fr_moduli, &fd_fr_moduli)),
        tgda_moduli,
        fr_moduli,
        fd_tgda_moduli,
        fd_fr_moduli,
    })
}
