use super::sampling::{cholesky, GaussianStream};
use crate::error::Result;
use crate::linalg::{vector::dot, Matrix};
use crate::oracle::{MinimaxOracle, Point};

/// The registered solution is the population optimum; finite-sample
/// stationary points sit `O(1/√N)` away from it.
const SOLUTION_FLOOR: f64 = 1e-2;

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eᵗ)` without overflow.
pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Mean-estimation GAN with a linear discriminator:
///
/// ```text
/// ℓ(η, ω) = mean_i log σ(ωᵀx_i) + mean_i log(1 − σ(ωᵀ(z_i + η)))
/// ```
///
/// `x_i` and `z_i` are drawn once from `N(0, Σ)` (all data first, then all
/// latents, from one stream). The generator mean `η` leads, the
/// discriminator `ω` follows. The population optimum is the origin.
#[derive(Debug, Clone)]
pub struct GaussianMeanGan {
    sigma: Matrix,
    dim: usize,
    data: Vec<f64>,
    latents: Vec<f64>,
}

impl GaussianMeanGan {
    pub fn new(sigma: Matrix, n_samples: usize, seed: u64) -> Result<Self> {
        let chol = cholesky(&sigma)?;
        let dim = sigma.rows();
        let mut stream = GaussianStream::new(seed);
        let mut draw = |count: usize| -> Vec<f64> { (0..count).flat_map(|_| stream.correlated(&chol)).collect() };
        let data = draw(n_samples);
        let latents = draw(n_samples);
        Ok(Self { sigma, dim, data, latents })
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn n_samples(&self) -> usize {
        self.data.len() / self.dim
    }

    fn samples<'a>(&'a self, buf: &'a [f64]) -> impl Iterator<Item = &'a [f64]> {
        buf.chunks_exact(self.dim)
    }

    fn inv_n(&self) -> f64 {
        1.0 / self.n_samples() as f64
    }

    /// Calls `visit(u, s)` for every `u_i = z_i + η` with `s = σ(ωᵀu_i)`.
    fn for_fake(&self, z: &Point, mut visit: impl FnMut(&[f64], f64)) {
        let mut u = vec![0.0; self.dim];
        for zi in self.samples(&self.latents) {
            for ((uk, zk), ek) in u.iter_mut().zip(zi).zip(&z.x) {
                *uk = zk + ek;
            }
            visit(&u, sigmoid(dot(&z.y, &u)));
        }
    }
}

/// Population Hessian blocks at the optimum: `(∂ηη, ∂ωω, ∂ηω) = (0, −½Σ, −½I)`.
pub fn population_hessians_gaussian_mean(sigma: &Matrix) -> (Matrix, Matrix, Matrix) {
    let d = sigma.rows();
    (Matrix::zeros(d, d), sigma.scale(-0.5), Matrix::identity(d).scale(-0.5))
}

impl MinimaxOracle for GaussianMeanGan {
    fn name(&self) -> &str {
        "gaussian_mean"
    }

    fn dims(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    fn value(&self, z: &Point) -> f64 {
        let real: f64 = self.samples(&self.data).map(|x| -softplus(-dot(&z.y, x))).sum();
        let mut fake = 0.0;
        let mut u = vec![0.0; self.dim];
        for zi in self.samples(&self.latents) {
            for ((uk, zk), ek) in u.iter_mut().zip(zi).zip(&z.x) {
                *uk = zk + ek;
            }
            fake -= softplus(dot(&z.y, &u));
        }
        (real + fake) * self.inv_n()
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let mut mean_s = 0.0;
        self.for_fake(z, |_, s| mean_s += s);
        z.y.iter().map(|w| -mean_s * self.inv_n() * w).collect()
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for x in self.samples(&self.data) {
            let a = sigmoid(dot(&z.y, x));
            for (gk, xk) in g.iter_mut().zip(x) {
                *gk += (1.0 - a) * xk;
            }
        }
        self.for_fake(z, |u, s| {
            for (gk, uk) in g.iter_mut().zip(u) {
                *gk -= s * uk;
            }
        });
        g.iter().map(|v| v * self.inv_n()).collect()
    }

    fn hvp_xx(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let mut c = 0.0;
        self.for_fake(z, |_, s| c += s * (1.0 - s));
        let scale = -c * self.inv_n() * dot(&z.y, v);
        z.y.iter().map(|w| scale * w).collect()
    }

    // ∂ηω ℓ · v = −mean(s v + s(1−s)(uᵀv) ω)
    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let (mut sum_s, mut sum_uv) = (0.0, 0.0);
        self.for_fake(z, |u, s| {
            sum_s += s;
            sum_uv += s * (1.0 - s) * dot(u, v);
        });
        let k = self.inv_n();
        v.iter().zip(&z.y).map(|(vk, wk)| -k * (sum_s * vk + sum_uv * wk)).collect()
    }

    // ∂ωη ℓ · w = −mean(s w + s(1−s)(ωᵀw) u)
    fn hvp_yx(&self, z: &Point, w: &[f64]) -> Vec<f64> {
        let ow = dot(&z.y, w);
        let mut sum_s = 0.0;
        let mut acc = vec![0.0; self.dim];
        self.for_fake(z, |u, s| {
            sum_s += s;
            for (ak, uk) in acc.iter_mut().zip(u) {
                *ak += s * (1.0 - s) * ow * uk;
            }
        });
        let k = self.inv_n();
        w.iter().zip(&acc).map(|(wk, ak)| -k * (sum_s * wk + ak)).collect()
    }

    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for x in self.samples(&self.data) {
            let a = sigmoid(dot(&z.y, x));
            let c = a * (1.0 - a) * dot(x, v);
            for (ak, xk) in acc.iter_mut().zip(x) {
                *ak -= c * xk;
            }
        }
        self.for_fake(z, |u, s| {
            let c = s * (1.0 - s) * dot(u, v);
            for (ak, uk) in acc.iter_mut().zip(u) {
                *ak -= c * uk;
            }
        });
        acc.iter().map(|v| v * self.inv_n()).collect()
    }

    fn known_solution(&self) -> Option<Point> {
        Some(Point::zeros(self.dim, self.dim))
    }

    fn solution_tolerance_floor(&self) -> f64 {
        SOLUTION_FLOOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_sigmoid_and_softplus() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) == 1.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
    }

    #[test]
    fn dataset_is_deterministic() {
        let s = Matrix::from_diag(&[1.0, 0.05]);
        let a = GaussianMeanGan::new(s.clone(), 50, 3).unwrap();
        let b = GaussianMeanGan::new(s, 50, 3).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.latents, b.latents);
        assert_eq!(a.n_samples(), 50);
    }
}
