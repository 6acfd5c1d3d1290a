use crate::oracle::{MinimaxOracle, Point};

/// Nonconvex-nonconcave quartic with `x, y ∈ R²`:
///
/// ```text
/// f = −2.5 x1² − 0.025 x2² − 0.5 y1² − 0.05 y2² + x1 y2 + x2 y1
///     − 0.01 (y1⁴ + y2⁴) + 0.3 x1⁴ + 0.2 x2⁴ − x1³ y2
/// ```
///
/// The origin is a strict local minimax point with `∂yy f = diag(−1, −0.1)`
/// and `D_xx f = diag(5, 0.95)`, but not a local Nash point since `∂xx f ≺ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SyntheticQuartic;

impl SyntheticQuartic {
    pub const X0: [f64; 2] = [0.02, 0.04];
    pub const Y0: [f64; 2] = [0.03, 0.05];
    pub const ALPHA_L: f64 = 0.08;
    pub const ALPHA_F: f64 = 0.5;

    pub fn initial_point() -> Point {
        Point::new(Self::X0.to_vec(), Self::Y0.to_vec())
    }
}

impl MinimaxOracle for SyntheticQuartic {
    fn name(&self) -> &str {
        "synthetic_quartic"
    }

    fn dims(&self) -> (usize, usize) {
        (2, 2)
    }

    fn default_start(&self) -> Point {
        Self::initial_point()
    }

    fn value(&self, z: &Point) -> f64 {
        let ([x1, x2], [y1, y2]) = ([z.x[0], z.x[1]], [z.y[0], z.y[1]]);
        -2.5 * x1 * x1 - 0.025 * x2 * x2 - 0.5 * y1 * y1 - 0.05 * y2 * y2 + x1 * y2 + x2 * y1
            - 0.01 * (y1.powi(4) + y2.powi(4))
            + 0.3 * x1.powi(4)
            + 0.2 * x2.powi(4)
            - x1.powi(3) * y2
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let ([x1, x2], [y1, y2]) = ([z.x[0], z.x[1]], [z.y[0], z.y[1]]);
        vec![
            -5.0 * x1 + y2 + 1.2 * x1.powi(3) - 3.0 * x1 * x1 * y2,
            -0.05 * x2 + y1 + 0.8 * x2.powi(3),
        ]
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let ([x1, x2], [y1, y2]) = ([z.x[0], z.x[1]], [z.y[0], z.y[1]]);
        vec![-y1 + x2 - 0.04 * y1.powi(3), -0.1 * y2 + x1 - 0.04 * y2.powi(3) - x1.powi(3)]
    }

    fn hvp_xx(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let (x1, x2, y2) = (z.x[0], z.x[1], z.y[1]);
        vec![(-5.0 + 3.6 * x1 * x1 - 6.0 * x1 * y2) * v[0], (-0.05 + 2.4 * x2 * x2) * v[1]]
    }

    // ∂xy f = [[0, 1 − 3x1²], [1, 0]]
    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let x1 = z.x[0];
        vec![(1.0 - 3.0 * x1 * x1) * v[1], v[0]]
    }

    fn hvp_yx(&self, z: &Point, u: &[f64]) -> Vec<f64> {
        let x1 = z.x[0];
        vec![u[1], (1.0 - 3.0 * x1 * x1) * u[0]]
    }

    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let (y1, y2) = (z.y[0], z.y[1]);
        vec![(-1.0 - 0.12 * y1 * y1) * v[0], (-0.1 - 0.12 * y2 * y2) * v[1]]
    }

    fn known_solution(&self) -> Option<Point> {
        Some(Point::zeros(2, 2))
    }
}
