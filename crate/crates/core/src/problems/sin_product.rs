use std::f64::consts::FRAC_PI_2;

use crate::oracle::{MinimaxOracle, Point};

/// `f(x, y) = (x² + 1)(2 + sin y)`.
///
/// `(0, π/2)` is a strict local minimax point. `(0, −π/2)` is stationary
/// with `∂yy f > 0` there, a local minimum in both variables, so it is not
/// minimax; Newton-type follower updates can still be attracted to it.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinProduct;

impl SinProduct {
    pub fn local_minimum() -> Point {
        Point::new(vec![0.0], vec![-FRAC_PI_2])
    }
}

impl MinimaxOracle for SinProduct {
    fn name(&self) -> &str {
        "sin_product"
    }

    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }

    fn value(&self, z: &Point) -> f64 {
        let (x, y) = (z.x[0], z.y[0]);
        (x * x + 1.0) * (2.0 + y.sin())
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let (x, y) = (z.x[0], z.y[0]);
        vec![2.0 * x * (2.0 + y.sin())]
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let (x, y) = (z.x[0], z.y[0]);
        vec![(x * x + 1.0) * y.cos()]
    }

    fn hvp_xx(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        vec![2.0 * (2.0 + z.y[0].sin()) * v[0]]
    }

    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        vec![2.0 * z.x[0] * z.y[0].cos() * v[0]]
    }

    fn hvp_yx(&self, z: &Point, u: &[f64]) -> Vec<f64> {
        vec![2.0 * z.x[0] * z.y[0].cos() * u[0]]
    }

    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let (x, y) = (z.x[0], z.y[0]);
        vec![-(x * x + 1.0) * y.sin() * v[0]]
    }

    fn known_solution(&self) -> Option<Point> {
        Some(Point::new(vec![0.0], vec![FRAC_PI_2]))
    }

    fn landmarks(&self) -> Vec<(&'static str, Point)> {
        vec![("slmm", self.known_solution().unwrap()), ("local_minimum", Self::local_minimum())]
    }
}
