use crate::error::{Error, Result};
use crate::linalg::{eig_symmetric, vector, Matrix};
use crate::oracle::{MinimaxOracle, Point};

/// `f(x, y) = ½ xᵀA x + ½ yᵀB y + xᵀC y`.
///
/// Built with [`QuadraticMinimax::new`] the origin is guaranteed to be a
/// strict local minimax point: `B ≺ 0` and `A − C B⁻¹ Cᵀ ≻ 0`.
#[derive(Debug, Clone)]
pub struct QuadraticMinimax {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    slmm_at_origin: bool,
}

impl QuadraticMinimax {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let mut q = Self::general(a, b, c)?;
        let b_eigs = eig_symmetric(&q.b)?;
        if b_eigs.last().is_some_and(|&top| top >= 0.0) {
            return Err(Error::config("problem.params.b", "B must be negative definite"));
        }
        let b_inv_ct = crate::linalg::Lu::factorize(&q.b, "B")?.solve_matrix(&q.c.transpose())?;
        let schur = q.a.sub(&q.c.matmul(&b_inv_ct)).symmetrized();
        if eig_symmetric(&schur)?.first().is_some_and(|&low| low <= 0.0) {
            return Err(Error::config("problem.params", "A - C B^-1 C^T must be positive definite"));
        }
        q.slmm_at_origin = true;
        Ok(q)
    }

    /// Any symmetric `A`, `B` and conformable `C`; no curvature requirements.
    pub fn general(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let (n, m) = (a.rows(), b.rows());
        if !a.is_symmetric() {
            return Err(Error::config("problem.params.a", "A must be square and symmetric"));
        }
        if !b.is_symmetric() {
            return Err(Error::config("problem.params.b", "B must be square and symmetric"));
        }
        if c.rows() != n || c.cols() != m {
            return Err(Error::config("problem.params.c", format!("C must be {n}x{m}")));
        }
        Ok(Self { a, b, c, slmm_at_origin: false })
    }

    /// `f = 2x² − y² + 2xy`.
    pub fn q1() -> Self {
        let s = |v: f64| Matrix::from_diag(&[v]);
        Self::new(s(4.0), s(-2.0), s(2.0)).expect("Q1 is a valid SLmM quadratic")
    }

    /// `f = xᵀ C y`, a pure rotation game.
    pub fn bilinear(c: Matrix) -> Result<Self> {
        let (n, m) = (c.rows(), c.cols());
        Self::general(Matrix::zeros(n, n), Matrix::zeros(m, m), c)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }
}

impl MinimaxOracle for QuadraticMinimax {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.b.rows())
    }

    fn value(&self, z: &Point) -> f64 {
        0.5 * vector::dot(&z.x, &self.a.matvec(&z.x))
            + 0.5 * vector::dot(&z.y, &self.b.matvec(&z.y))
            + vector::dot(&z.x, &self.c.matvec(&z.y))
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        vector::add(&self.a.matvec(&z.x), &self.c.matvec(&z.y))
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        vector::add(&self.b.matvec(&z.y), &self.c.matvec_transpose(&z.x))
    }

    fn hvp_xx(&self, _z: &Point, v: &[f64]) -> Vec<f64> {
        self.a.matvec(v)
    }

    fn hvp_xy(&self, _z: &Point, v: &[f64]) -> Vec<f64> {
        self.c.matvec(v)
    }

    fn hvp_yx(&self, _z: &Point, u: &[f64]) -> Vec<f64> {
        self.c.matvec_transpose(u)
    }

    fn hvp_yy(&self, _z: &Point, v: &[f64]) -> Vec<f64> {
        self.b.matvec(v)
    }

    fn known_solution(&self) -> Option<Point> {
        self.slmm_at_origin.then(|| Point::zeros(self.a.rows(), self.b.rows()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_values() {
        let q = QuadraticMinimax::q1();
        let z = Point::new(vec![1.0], vec![0.0]);
        assert_eq!(q.value(&z), 2.0);
        assert_eq!(q.grad_x(&z), vec![4.0]);
        assert_eq!(q.grad_y(&z), vec![2.0]);
        assert_eq!(q.known_solution(), Some(Point::zeros(1, 1)));
    }

    #[test]
    fn rejects_non_slmm() {
        let s = |v: f64| Matrix::from_diag(&[v]);
        assert!(QuadraticMinimax::new(s(1.0), s(1.0), s(0.0)).is_err());
        // D_xx = -3 - 1·(−1)⁻¹·1 = −2 < 0
        assert!(QuadraticMinimax::new(s(-3.0), s(-1.0), s(1.0)).is_err());
        assert!(QuadraticMinimax::new(s(1.0), s(-1.0), Matrix::zeros(1, 2)).is_err());
        let bil = QuadraticMinimax::bilinear(s(1.0)).unwrap();
        assert!(bil.known_solution().is_none());
    }
}
