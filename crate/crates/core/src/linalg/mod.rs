//! Dense small-matrix linear algebra and matrix-free least-squares solves.

mod cg;
mod eigen;
mod lu;
mod matrix;
mod operator;
pub mod vector;

pub use cg::{cg_normal_solve, CgResult, SINGULAR_GROWTH};
pub use eigen::{eig_general, eig_symmetric, eigh, sorted_moduli, spectral_radius, SymmetricEigen, QR_SWEEPS_PER_DIM};
pub use lu::{block_inverse, dense_inverse, dense_solve, determinant, Lu, PIVOT_TOL};
pub use matrix::{Matrix, SYMMETRY_TOL};
pub use operator::{assemble, FnOperator, LinearOperator, SymmetricOperator};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("numerical failure (NaN/Inf) at iteration {iteration}")]
    NumericalFailure { iteration: usize },
    #[error("singular block {block}")]
    Singular { block: String },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
}
