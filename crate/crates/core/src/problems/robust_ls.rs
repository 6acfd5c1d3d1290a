use super::sampling::GaussianStream;
use crate::error::{Error, Result};
use crate::linalg::{dense_solve, vector::dot, Matrix};
use crate::oracle::{MinimaxOracle, Point};

/// Distributionally robust least squares:
///
/// ```text
/// f(θ, Ω) = Σ_i ½ (ω_iᵀθ − b_i)² − γ ‖ω_i − a_i‖²
/// ```
///
/// The adversary moves each feature vector `ω_i` away from its observed
/// value `a_i` at quadratic cost. With `feature_rank = k < N`, the `a_i`
/// span a `k`-dimensional subspace, so residuals at stationary points are
/// nonzero; with `N < d` the summed `∂θθ f = Σ ω_i ω_iᵀ` is singular there
/// while the total Hessian is not.
#[derive(Debug, Clone)]
pub struct RobustLeastSquares {
    d: usize,
    gamma: f64,
    features: Vec<f64>,
    targets: Vec<f64>,
}

impl RobustLeastSquares {
    pub fn new(n_samples: usize, dim: usize, feature_rank: usize, gamma: f64, seed: u64) -> Result<Self> {
        if n_samples == 0 || dim == 0 {
            return Err(Error::config("problem.params", "n_samples and dim must be positive"));
        }
        if feature_rank == 0 || feature_rank > dim {
            return Err(Error::config("problem.params.feature_rank", format!("must be in 1..={dim}")));
        }
        if !(gamma > 0.0) {
            return Err(Error::config("problem.params.gamma", "must be positive"));
        }
        let mut stream = GaussianStream::new(seed);
        let features = if feature_rank == dim {
            stream.normal_vec(n_samples * dim, 1.0)
        } else {
            let basis = Matrix::from_row_major(dim, feature_rank, stream.normal_vec(dim * feature_rank, 1.0))?;
            (0..n_samples).flat_map(|_| basis.matvec(&stream.normal_vec(feature_rank, 1.0))).collect()
        };
        let targets = stream.normal_vec(n_samples, 1.0);
        Ok(Self { d: dim, gamma, features, targets })
    }

    pub fn from_data(features: Vec<Vec<f64>>, targets: Vec<f64>, gamma: f64) -> Result<Self> {
        let d = features.first().map_or(0, Vec::len);
        if d == 0 || features.iter().any(|a| a.len() != d) || features.len() != targets.len() {
            return Err(Error::config("problem.params", "features must be N equal-length rows matching targets"));
        }
        Ok(Self { d, gamma, features: features.concat(), targets })
    }

    pub fn n_samples(&self) -> usize {
        self.targets.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    fn omegas<'a>(&self, y: &'a [f64]) -> impl Iterator<Item = &'a [f64]> {
        y.chunks_exact(self.d)
    }

    fn residuals(&self, z: &Point) -> Vec<f64> {
        self.omegas(&z.y).zip(&self.targets).map(|(w, b)| dot(w, &z.x) - b).collect()
    }

    /// Follower best response for fixed `θ`, valid while `‖θ‖² < 2γ`:
    /// `ω_i = a_i + r_i θ / (2γ)` with `r_i = (a_iᵀθ − b_i) / (1 − ‖θ‖²/(2γ))`.
    pub fn best_response(&self, theta: &[f64]) -> Vec<f64> {
        let t = dot(theta, theta) / (2.0 * self.gamma);
        (0..self.n_samples())
            .flat_map(|i| {
                let a = self.feature(i);
                let r = (dot(a, theta) - self.targets[i]) / (1.0 - t);
                a.iter().zip(theta).map(move |(ak, tk)| ak + r * tk / (2.0 * self.gamma)).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Starting point for a stationary-point search: the ridge-regularized
    /// least-squares `θ` on the clean data and the matching best response.
    pub fn initial_guess(&self) -> Result<Point> {
        let d = self.d;
        let mut gram = Matrix::identity(d).scale(1e-10);
        let mut rhs = vec![0.0; d];
        for i in 0..self.n_samples() {
            let a = self.feature(i);
            for r in 0..d {
                rhs[r] += a[r] * self.targets[i];
                for c in 0..d {
                    gram[(r, c)] += a[r] * a[c];
                }
            }
        }
        let theta = dense_solve(&gram, &rhs)?;
        let omega = self.best_response(&theta);
        Ok(Point::new(theta, omega))
    }
}

impl MinimaxOracle for RobustLeastSquares {
    fn name(&self) -> &str {
        "robust_least_squares"
    }

    fn default_start(&self) -> Point {
        self.initial_guess().unwrap_or_else(|_| Point::new(vec![1.0; self.dims().0], vec![1.0; self.dims().1]))
    }

    fn dims(&self) -> (usize, usize) {
        (self.d, self.d * self.n_samples())
    }

    fn value(&self, z: &Point) -> f64 {
        let r = self.residuals(z);
        (0..self.n_samples())
            .map(|i| {
                let w = &z.y[i * self.d..(i + 1) * self.d];
                let shift: f64 = w.iter().zip(self.feature(i)).map(|(p, q)| (p - q) * (p - q)).sum();
                0.5 * r[i] * r[i] - self.gamma * shift
            })
            .sum()
    }

    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let mut g = vec![0.0; self.d];
        for (w, r) in self.omegas(&z.y).zip(self.residuals(z)) {
            for (gk, wk) in g.iter_mut().zip(w) {
                *gk += r * wk;
            }
        }
        g
    }

    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let r = self.residuals(z);
        let mut g = Vec::with_capacity(z.y.len());
        for (i, w) in self.omegas(&z.y).enumerate() {
            for ((wk, ak), tk) in w.iter().zip(self.feature(i)).zip(&z.x) {
                g.push(r[i] * tk - 2.0 * self.gamma * (wk - ak));
            }
        }
        g
    }

    fn hvp_xx(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        for w in self.omegas(&z.y) {
            let c = dot(w, v);
            for (ok, wk) in out.iter_mut().zip(w) {
                *ok += c * wk;
            }
        }
        out
    }

    // Σ_i r_i v_i + ω_i (θᵀv_i)
    fn hvp_xy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let r = self.residuals(z);
        let mut out = vec![0.0; self.d];
        for (i, (w, vi)) in self.omegas(&z.y).zip(v.chunks_exact(self.d)).enumerate() {
            let c = dot(&z.x, vi);
            for ((ok, wk), vk) in out.iter_mut().zip(w).zip(vi) {
                *ok += r[i] * vk + c * wk;
            }
        }
        out
    }

    // block i: r_i u + θ (ω_iᵀu)
    fn hvp_yx(&self, z: &Point, u: &[f64]) -> Vec<f64> {
        let r = self.residuals(z);
        let mut out = Vec::with_capacity(z.y.len());
        for (i, w) in self.omegas(&z.y).enumerate() {
            let c = dot(w, u);
            out.extend(u.iter().zip(&z.x).map(|(uk, tk)| r[i] * uk + c * tk));
        }
        out
    }

    // block i: (θθᵀ − 2γI) v_i
    fn hvp_yy(&self, z: &Point, v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        for vi in v.chunks_exact(self.d) {
            let c = dot(&z.x, vi);
            out.extend(vi.iter().zip(&z.x).map(|(vk, tk)| c * tk - 2.0 * self.gamma * vk));
        }
        out
    }
}
