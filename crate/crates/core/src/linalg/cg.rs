//! Conjugate gradient on the normal equations (CGNR).
//!
//! Indefinite Hessian blocks cannot be handed to plain CG, so every inverse in
//! the solvers is computed as a least-squares solve: CG is run on
//! `Aᵀ A x = Aᵀ b`, touching `A` only through one `apply` and one
//! `apply_transpose` per iteration.
//!
//! Termination happens at `max_iter` or once the normal-equation residual
//! `‖Aᵀ(b − A x)‖` drops to `tol`. With `tol = 0` the solve is budget-limited
//! and only stops early on an exactly zero residual.

use serde::{Deserialize, Serialize};

use super::vector::{axpy, dot, is_finite, norm};
use super::{LinalgError, LinearOperator};

/// Solution growth beyond this multiple of `‖b‖` flags a near-singular system.
pub const SINGULAR_GROWTH: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgResult {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Norm of the normal-equation residual `Aᵀ(b − A x)` at exit.
    pub final_residual_norm: f64,
    pub converged: bool,
}

impl CgResult {
    /// True when the solution norm exceeds `1e8·‖rhs‖`, the signature of a
    /// (nearly) singular operator.
    pub fn suspect_singular(&self, rhs_norm: f64) -> bool {
        norm(&self.solution) > SINGULAR_GROWTH * rhs_norm
    }
}

pub fn cg_normal_solve(
    a: &dyn LinearOperator,
    b: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<CgResult, LinalgError> {
    let n = a.domain_dim();
    if a.codomain_dim() != n || b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            context: "cg_normal_solve",
            expected: n,
            found: if a.codomain_dim() != n { a.codomain_dim() } else { b.len() },
        });
    }
    if max_iter == 0 {
        return Err(LinalgError::InvalidArgument("cg_normal_solve: max_iter must be >= 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(LinalgError::InvalidArgument("cg_normal_solve: tol must be >= 0".into()));
    }
    if !is_finite(b) {
        return Err(LinalgError::NonFinite { context: "cg_normal_solve rhs" });
    }

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut s = a.apply_transpose(&r);
    let mut gamma = dot(&s, &s);
    let mut p = s.clone();
    let mut iterations = 0;

    while iterations < max_iter {
        if gamma.sqrt() <= tol || gamma == 0.0 {
            break;
        }
        let q = a.apply(&p);
        let qq = dot(&q, &q);
        if qq == 0.0 {
            // p lies in the null space of A: no further progress is possible.
            break;
        }
        let alpha = gamma / qq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        s = a.apply_transpose(&r);
        let gamma_next = dot(&s, &s);
        iterations += 1;
        if !gamma_next.is_finite() || !alpha.is_finite() {
            return Err(LinalgError::NumericalFailure { iteration: iterations });
        }
        let beta = gamma_next / gamma;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
        gamma = gamma_next;
    }

    let final_residual_norm = gamma.sqrt();
    Ok(CgResult { solution: x, iterations, final_residual_norm, converged: final_residual_norm <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_solve, Matrix, SymmetricOperator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&d) / norm(b).max(1e-300)
    }

    #[test]
    fn identity_system_in_one_iteration() {
        let res = cg_normal_solve(&Matrix::identity(3), &[1.0, 2.0, 3.0], 10, 1e-14).unwrap();
        assert!(res.iterations <= 1);
        assert!(res.converged);
        assert!(rel_err(&res.solution, &[1.0, 2.0, 3.0]) < 1e-15);
    }

    #[test]
    fn indefinite_diagonal() {
        let a = Matrix::from_diag(&[2.0, -3.0]);
        let res = cg_normal_solve(&a, &[4.0, 9.0], 10, 0.0).unwrap();
        assert!(rel_err(&res.solution, &[2.0, -3.0]) < 1e-14);
    }

    #[test]
    fn zero_rhs_returns_zero_without_iterating() {
        let res = cg_normal_solve(&Matrix::from_diag(&[1.0, 2.0]), &[0.0, 0.0], 5, 0.0).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.solution, vec![0.0, 0.0]);
        assert!(res.converged);
    }

    #[test]
    fn budget_is_respected() {
        let a = Matrix::from_diag(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let res = cg_normal_solve(&a, &[1.0; 5], 2, 0.0).unwrap();
        assert_eq!(res.iterations, 2);
        assert!(!res.converged);
    }

    #[test]
    fn argument_errors() {
        let a = Matrix::identity(2);
        assert!(matches!(cg_normal_solve(&a, &[1.0], 3, 0.0), Err(LinalgError::DimensionMismatch { .. })));
        assert!(matches!(cg_normal_solve(&a, &[1.0, 1.0], 0, 0.0), Err(LinalgError::InvalidArgument(_))));
        assert!(matches!(cg_normal_solve(&a, &[1.0, f64::NAN], 3, 0.0), Err(LinalgError::NonFinite { .. })));
        let rect = Matrix::zeros(2, 3);
        assert!(cg_normal_solve(&rect, &[1.0, 1.0], 3, 0.0).is_err());
    }

    #[test]
    fn nan_during_iteration_reports_index() {
        let op = SymmetricOperator::new(2, |v: &[f64]| vec![v[0] * f64::INFINITY, v[1]]);
        match cg_normal_solve(&op, &[1.0, 1.0], 5, 0.0) {
            Err(LinalgError::NumericalFailure { iteration }) => assert_eq!(iteration, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Random symmetric indefinite matrix `Q·diag(d)·Qᵀ` with `|d| ∈ [1, 40]`.
    fn random_indefinite(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let g = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        // Orthonormalize columns with modified Gram-Schmidt.
        let mut q = g.clone();
        for j in 0..n {
            for k in 0..j {
                let proj: f64 = (0..n).map(|i| q[(i, j)] * q[(i, k)]).sum();
                for i in 0..n {
                    let v = q[(i, k)];
                    q[(i, j)] -= proj * v;
                }
            }
            let nrm: f64 = (0..n).map(|i| q[(i, j)].powi(2)).sum::<f64>().sqrt();
            for i in 0..n {
                q[(i, j)] /= nrm;
            }
        }
        let d: Vec<f64> = (0..n)
            .map(|i| {
                let mag = rng.gen_range(1.0..40.0);
                if i % 2 == 0 { mag } else { -mag }
            })
            .collect();
        q.matmul(&Matrix::from_diag(&d)).matmul(&q.transpose())
    }

    #[test]
    fn indefinite_system_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let a = random_indefinite(&mut rng, 8);
            let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let res = cg_normal_solve(&a, &b, 200, 0.0).unwrap();
            let exact = dense_solve(&a, &b).unwrap();
            assert!(rel_err(&res.solution, &exact) < 1e-8, "{}", rel_err(&res.solution, &exact));
        }
    }

    #[test]
    fn agrees_with_dense_solve_on_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let g = Matrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
            let a = g.matmul(&g.transpose()).add(&Matrix::identity(6));
            let b: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let res = cg_normal_solve(&a, &b, 100, 0.0).unwrap();
            assert!(rel_err(&res.solution, &dense_solve(&a, &b).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn finite_termination_with_n_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Matrix::from_fn(4, 4, |i, j| if i == j { 2.0 + i as f64 } else { rng.gen_range(-0.3..0.3) });
        let b = [1.0, -1.0, 0.5, 2.0];
        let res = cg_normal_solve(&a, &b, 4, 0.0).unwrap();
        assert!(rel_err(&res.solution, &dense_solve(&a, &b).unwrap()) < 1e-9);
    }

    #[test]
    fn singular_growth_flag() {
        let res = CgResult { solution: vec![1e9, 0.0], iterations: 1, final_residual_norm: 0.0, converged: true };
        assert!(res.suspect_singular(1.0));
        assert!(!res.suspect_singular(100.0));
    }
}
