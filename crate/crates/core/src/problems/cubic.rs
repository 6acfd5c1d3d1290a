use crate::oracle::{MinimaxOracle, Point};

/// `f(x, y) = −3x² + x y² − y² + 4xy` on `R × R`.
///
/// At the origin `∂xx f = −6`, `∂yy f = −2` and `D_xx f = 2`, so the origin
/// is a strict local minimax point that is not a local Nash point.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicExample;

impl MinimaxOracle for CubicExample {
    fn name(&self) -> &str {
        "cubic_example"
    }

    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }

    fn value(&self, z: &Point) -> f64 {
        let (x, y) = (z.x[0], z.y[0]);
        -3.0 * x * x + x * y * y - y * y + 4.0 * x * y
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let (x, y) = (z.x[0], z.y[0]);
        vec![-6.0 * x + y * y + 4.0 * y]
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let (x, y) = (z.x[0], z.y[0]);
        vec![2.0 * x * y - 2.0 * y + 4.0 * x]
    }

    fn hvp_xx(&self, _z: &Point, v: &[f64]) -> Vec<f64> {
        vec![-6.0 * v[0]]
    }

    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        vec![(2.0 * z.y[0] + 4.0) * v[0]]
    }

    fn hvp_yx(&self, z: &Point, u: &[f64]) -> Vec<f64> {
        vec![(2.0 * z.y[0] + 4.0) * u[0]]
    }

    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        vec![(2.0 * z.x[0] - 2.0) * v[0]]
    }

    fn known_solution(&self) -> Option<Point> {
        Some(Point::zeros(1, 1))
    }
}
