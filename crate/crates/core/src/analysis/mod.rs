//! Point classification, step-map Jacobians and convergence-rate checks.

mod classify;
mod empirical;
mod spectral;

pub use classify::{classify_point, refine_stationary, PointClassification, DEFAULT_EIG_TOL, DEFAULT_GRAD_TOL};
pub use empirical::{empirical_rate, rate_from_errors, RateEstimate, DISTANCE_FLOOR};
pub use spectral::{
    add_jacobian_radii, asymptotic_rate, fixed_point_residual, preconditioner, state_dim, step_jacobian_fd,
    theoretical_rates, verify_transpose_relation, MomentumConstants, SpectralReport, TransposeReport,
    FD_STEP, FD_STEP_LINEAR, FIXED_POINT_TOL, STATIONARY_TOL,
};
