//! Reproducible Gaussian sampling.
//!
//! Streams come from ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`)
//! and standard normals from the Box–Muller transform applied to pairs of
//! uniforms `u1 ∈ (0, 1]`, `u2 ∈ [0, 1)`:
//!
//! ```text
//! r = sqrt(−2 ln u1),  z0 = r cos(2π u2),  z1 = r sin(2π u2)
//! ```
//!
//! Both outputs of each pair are used, in that order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), spare: None }
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal_vec(&mut self, dim: usize, stddev: f64) -> Vec<f64> {
        (0..dim).map(|_| stddev * self.standard_normal()).collect()
    }

    /// Draw from `N(0, L·Lᵀ)` given the lower Cholesky factor `L`.
    pub fn correlated(&mut self, chol: &Matrix) -> Vec<f64> {
        let g: Vec<f64> = (0..chol.cols()).map(|_| self.standard_normal()).collect();
        chol.matvec(&g)
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    if !m.is_symmetric() {
        return Err(Error::Precondition("covariance must be symmetric".into()));
    }
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::Precondition("covariance must be positive definite".into()));
        }
        l[(j, j)] = d.sqrt();
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = GaussianStream::new(7);
        let mut b = GaussianStream::new(7);
        let va: Vec<u64> = (0..101).map(|_| a.standard_normal().to_bits()).collect();
        let vb: Vec<u64> = (0..101).map(|_| b.standard_normal().to_bits()).collect();
        assert_eq!(va, vb);
        let mut c = GaussianStream::new(8);
        assert_ne!(va[0], c.standard_normal().to_bits());
    }

    #[test]
    fn moments_are_standard() {
        let mut s = GaussianStream::new(1);
        let n = 200_000;
        let v: Vec<f64> = (0..n).map(|_| s.standard_normal()).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert!(l.matmul(&l.transpose()).max_abs_diff(&m) < 1e-14);
        assert!(cholesky(&Matrix::from_diag(&[1.0, -1.0])).is_err());
    }
}
