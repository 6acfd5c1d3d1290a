use serde::{Deserialize, Serialize};

use crate::linalg::vector;

/// An iterate `z = (x, y)`: leader variables `x` and follower variables `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; m] }
    }

    /// Splits a flat `[x; y]` vector after `n` entries.
    pub fn from_flat(flat: &[f64], n: usize) -> Self {
        let (x, y) = flat.split_at(n);
        Self { x: x.to_vec(), y: y.to_vec() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.x.clone();
        out.extend_from_slice(&self.y);
        out
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn norm(&self) -> f64 {
        (vector::dot(&self.x, &self.x) + vector::dot(&self.y, &self.y)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        vector::is_finite(&self.x) && vector::is_finite(&self.y)
    }

    /// Euclidean distances `(‖x − x*‖, ‖y − y*‖)`.
    pub fn distances_to(&self, other: &Point) -> (f64, f64) {
        (vector::norm(&vector::sub(&self.x, &other.x)), vector::norm(&vector::sub(&self.y, &other.y)))
    }

    pub fn distance_to(&self, other: &Point) -> f64 {
        let (dx, dy) = self.distances_to(other);
        dx.hypot(dy)
    }
}
