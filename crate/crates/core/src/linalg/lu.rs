//! Partial-pivot LU factorization, dense solves, and the Schur-complement block inverse.

use super::{LinalgError, Matrix};

/// Pivots below `PIVOT_TOL · max|M_ij|` are treated as zero.
pub const PIVOT_TOL: f64 = 1e-12;

/// `P·M = L·U` stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factorizes a square matrix. `label` names the matrix in singularity errors.
    pub fn factorize(m: &Matrix, label: &str) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if !m.is_finite() {
            return Err(LinalgError::NonFinite { context: "Lu::factorize" });
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let threshold = PIVOT_TOL * m.max_abs();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= threshold || pmax == 0.0 {
                return Err(LinalgError::Singular { block: label.to_string() });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { context: "Lu::solve", expected: n, found: b.len() });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        let mut out = Matrix::zeros(self.dim(), b.cols());
        for j in 0..b.cols() {
            let col = self.solve(&b.column(j))?;
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        self.solve_matrix(&Matrix::identity(n)).expect("identity has matching dimension")
    }

    pub fn determinant(&self) -> f64 {
        self.sign * self.lu.diag().iter().product::<f64>()
    }
}

/// Solves `M x = b` by partial-pivot elimination.
pub fn dense_solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch { context: "dense_solve", expected: m.rows(), found: b.len() });
    }
    Lu::factorize(m, "M")?.solve(b)
}

pub fn dense_inverse(m: &Matrix) -> Result<Matrix, LinalgError> {
    Ok(Lu::factorize(m, "M")?.inverse())
}

pub fn determinant(m: &Matrix) -> Result<f64, LinalgError> {
    match Lu::factorize(m, "M") {
        Ok(lu) => Ok(lu.determinant()),
        Err(LinalgError::Singular { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Inverse of `[A B; C D]` from the Schur complement `S = A − B·D⁻¹·C`:
///
/// ```text
/// [ S⁻¹           −S⁻¹·B·D⁻¹              ]
/// [ −D⁻¹·C·S⁻¹     D⁻¹ + D⁻¹·C·S⁻¹·B·D⁻¹  ]
/// ```
///
/// The upper-left block of the result is `S⁻¹`.
pub fn block_inverse(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix, LinalgError> {
    super::matrix::check_block_shapes(a, b, c, d)?;
    let d_lu = Lu::factorize(d, "D")?;
    let d_inv_c = d_lu.solve_matrix(c)?;
    let schur = a.sub(&b.matmul(&d_inv_c));
    let s_inv = Lu::factorize(&schur, "S = A - B D^-1 C")?.inverse();
    // B·D⁻¹ = (D⁻ᵀ·Bᵀ)ᵀ
    let b_d_inv = Lu::factorize(&d.transpose(), "D")?.solve_matrix(&b.transpose())?.transpose();

    let upper_right = s_inv.matmul(&b_d_inv).scale(-1.0);
    let lower_left = d_inv_c.matmul(&s_inv).scale(-1.0);
    let lower_right = d_lu.inverse().add(&d_inv_c.matmul(&s_inv).matmul(&b_d_inv));
    Matrix::from_blocks(&s_inv, &upper_right, &lower_left, &lower_right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn identity_and_diagonal_solves() {
        let b = [1.0, -2.0, 3.5];
        assert_close(&dense_solve(&Matrix::identity(3), &b).unwrap(), &b, 0.0);
        let m = Matrix::from_diag(&[2.0, 4.0]);
        assert_close(&dense_solve(&m, &[2.0, 8.0]).unwrap(), &[1.0, 2.0], 1e-15);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(dense_solve(&m, &[1.0, 1.0]), Err(LinalgError::Singular { .. })));
        assert_eq!(determinant(&m).unwrap(), 0.0);
    }

    #[test]
    fn determinant_sign_with_pivoting() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), -1.0);
    }

    #[test]
    fn block_inverse_of_block_diagonal() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        let d = Matrix::from_diag(&[5.0]);
        let inv = block_inverse(&a, &Matrix::zeros(2, 1), &Matrix::zeros(1, 2), &d).unwrap();
        let a_inv = dense_inverse(&a).unwrap();
        assert!(inv.block(0, 0, 2, 2).max_abs_diff(&a_inv) < 1e-15);
        assert!((inv[(2, 2)] - 0.2).abs() < 1e-15);
        assert_eq!(inv[(0, 2)], 0.0);
        assert_eq!(inv[(2, 0)], 0.0);
    }

    #[test]
    fn block_inverse_scalar_blocks() {
        let s = |v: f64| Matrix::from_diag(&[v]);
        let inv = block_inverse(&s(2.0), &s(1.0), &s(1.0), &s(2.0)).unwrap();
        let expected = Matrix::from_rows(&[vec![2.0 / 3.0, -1.0 / 3.0], vec![-1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        assert!(inv.max_abs_diff(&expected) < 1e-15);
        assert!((inv[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn block_inverse_names_singular_block() {
        let s = |v: f64| Matrix::from_diag(&[v]);
        match block_inverse(&s(1.0), &s(1.0), &s(1.0), &s(0.0)) {
            Err(LinalgError::Singular { block }) => assert_eq!(block, "D"),
            other => panic!("unexpected {other:?}"),
        }
        // S = 1 − 1·1⁻¹·1 = 0
        match block_inverse(&s(1.0), &s(1.0), &s(1.0), &s(1.0)) {
            Err(LinalgError::Singular { block }) => assert!(block.starts_with('S')),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn block_inverse_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = Matrix::from_fn(6, 6, |i, j| rng.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 });
        let inv = block_inverse(&m.block(0, 0, 3, 3), &m.block(0, 3, 3, 3), &m.block(3, 0, 3, 3), &m.block(3, 3, 3, 3))
            .unwrap();
        assert!(inv.max_abs_diff(&dense_inverse(&m).unwrap()) < 1e-10);
        assert!(inv.matmul(&m).max_abs_diff(&Matrix::identity(6)) < 1e-9);
    }
}
