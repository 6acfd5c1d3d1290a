use super::gaussian_mean::{sigmoid, softplus};
use super::sampling::{cholesky, GaussianStream};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::oracle::{MinimaxOracle, Point};

pub const DEFAULT_REGULARIZATION: f64 = 1e-5;

/// Covariance-estimation GAN with a quadratic discriminator:
///
/// ```text
/// f(V, W) = mean_i log σ(x_iᵀW x_i) + mean_i log(1 − σ(g_iᵀW g_i)) − c‖W‖²_F,   g_i = V z_i
/// ```
///
/// `x_i ~ N(0, Σ)`, `z_i ~ N(0, I)`. The generator `V` leads, `W` follows;
/// both are flattened row-major. Solutions form the set `VVᵀ = Σ`,
/// `W + Wᵀ = 0`, so no single reference point is registered.
#[derive(Debug, Clone)]
pub struct GaussianCovarianceGan {
    sigma: Matrix,
    d: usize,
    reg: f64,
    data: Vec<f64>,
    latents: Vec<f64>,
}

/// `aᵀ M b` for a flat row-major `d×d` matrix.
fn bilin(m: &[f64], a: &[f64], b: &[f64], d: usize) -> f64 {
    (0..d).map(|i| a[i] * (0..d).map(|j| m[i * d + j] * b[j]).sum::<f64>()).sum()
}

/// `M b`
fn mat_vec(m: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    (0..d).map(|i| (0..d).map(|j| m[i * d + j] * b[j]).sum()).collect()
}

/// `(M + Mᵀ) b`
fn sym_vec(m: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    (0..d).map(|i| (0..d).map(|j| (m[i * d + j] + m[j * d + i]) * b[j]).sum()).collect()
}

/// `out += c · a bᵀ`
fn add_outer(out: &mut [f64], c: f64, a: &[f64], b: &[f64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] += c * a[i] * b[j];
        }
    }
}

impl GaussianCovarianceGan {
    pub fn new(sigma: Matrix, n_samples: usize, regularization: f64, seed: u64) -> Result<Self> {
        let chol = cholesky(&sigma)?;
        let d = sigma.rows();
        let mut stream = GaussianStream::new(seed);
        let data: Vec<f64> = (0..n_samples).flat_map(|_| stream.correlated(&chol)).collect();
        let latents = stream.normal_vec(n_samples * d, 1.0);
        Ok(Self { sigma, d, reg: regularization, data, latents })
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn regularization(&self) -> f64 {
        self.reg
    }

    fn inv_n(&self) -> f64 {
        (self.d as f64) / (self.data.len() as f64)
    }

    fn real(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// `(z_i, g_i = V z_i)` pairs.
    fn fake<'a>(&'a self, v: &'a [f64]) -> impl Iterator<Item = (&'a [f64], Vec<f64>)> + 'a {
        self.latents.chunks_exact(self.d).map(move |zi| (zi, mat_vec(v, zi, self.d)))
    }
}

impl MinimaxOracle for GaussianCovarianceGan {
    fn name(&self) -> &str {
        "gaussian_covariance"
    }

    fn dims(&self) -> (usize, usize) {
        (self.d * self.d, self.d * self.d)
    }

    fn value(&self, z: &Point) -> f64 {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let real: f64 = self.real().map(|x| -softplus(-bilin(w, x, x, d))).sum();
        let fake: f64 = self.fake(v).map(|(_, g)| -softplus(bilin(w, &g, &g, d))).sum();
        (real + fake) * self.inv_n() - self.reg * w.iter().map(|c| c * c).sum::<f64>()
    }

    // ∂V f = −mean s (W + Wᵀ) g zᵀ
    fn grad_x(&self, z: &Point) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for (zi, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            add_outer(&mut out, -s, &sym_vec(w, &g, d), zi, d);
        }
        out.iter().map(|c| c * self.inv_n()).collect()
    }

    // ∂W f = mean (1 − a) x xᵀ − mean s g gᵀ − 2cW
    fn grad_y(&self, z: &Point) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for x in self.real() {
            let a = sigmoid(bilin(w, x, x, d));
            add_outer(&mut out, 1.0 - a, x, x, d);
        }
        for (_, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            add_outer(&mut out, -s, &g, &g, d);
        }
        out.iter().zip(w).map(|(c, wk)| c * self.inv_n() - 2.0 * self.reg * wk).collect()
    }

    fn hvp_xx(&self, z: &Point, dv: &[f64]) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for (zi, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            let dg = mat_vec(dv, zi, d);
            let mg = sym_vec(w, &g, d);
            let dt: f64 = dg.iter().zip(&mg).map(|(a, b)| a * b).sum();
            add_outer(&mut out, -s * (1.0 - s) * dt, &mg, zi, d);
            add_outer(&mut out, -s, &sym_vec(w, &dg, d), zi, d);
        }
        out.iter().map(|c| c * self.inv_n()).collect()
    }

    // d/dε ∂V f(V, W + ε dW)
    fn hvp_xy(&self, z: &Point, dw: &[f64]) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for (zi, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            let dt = bilin(dw, &g, &g, d);
            add_outer(&mut out, -s * (1.0 - s) * dt, &sym_vec(w, &g, d), zi, d);
            add_outer(&mut out, -s, &sym_vec(dw, &g, d), zi, d);
        }
        out.iter().map(|c| c * self.inv_n()).collect()
    }

    // d/dε ∂W f(V + ε dV, W)
    fn hvp_yx(&self, z: &Point, dv: &[f64]) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for (zi, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            let dg = mat_vec(dv, zi, d);
            let dt: f64 = dg.iter().zip(sym_vec(w, &g, d)).map(|(a, b)| a * b).sum();
            add_outer(&mut out, -s * (1.0 - s) * dt, &g, &g, d);
            add_outer(&mut out, -s, &dg, &g, d);
            add_outer(&mut out, -s, &g, &dg, d);
        }
        out.iter().map(|c| c * self.inv_n()).collect()
    }

    fn hvp_yy(&self, z: &Point, dw: &[f64]) -> Vec<f64> {
        let (v, w, d) = (&z.x, &z.y, self.d);
        let mut out = vec![0.0; d * d];
        for x in self.real() {
            let a = sigmoid(bilin(w, x, x, d));
            add_outer(&mut out, -a * (1.0 - a) * bilin(dw, x, x, d), x, x, d);
        }
        for (_, g) in self.fake(v) {
            let s = sigmoid(bilin(w, &g, &g, d));
            add_outer(&mut out, -s * (1.0 - s) * bilin(dw, &g, &g, d), &g, &g, d);
        }
        out.iter().zip(dw).map(|(c, dk)| c * self.inv_n() - 2.0 * self.reg * dk).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::check_derivatives;

    #[test]
    fn derivatives_match_finite_differences() {
        let gan = GaussianCovarianceGan::new(Matrix::from_diag(&[1.0, 0.04]), 200, DEFAULT_REGULARIZATION, 11).unwrap();
        let z = Point::new(vec![0.9, 0.2, -0.1, 0.3], vec![0.4, -0.7, 0.2, -0.3]);
        let rep = check_derivatives(&gan, &z, 1e-5, 1);
        assert!(rep.max() < 1e-6, "{rep:?}");
    }

    #[test]
    fn skew_discriminator_is_stationary_for_w() {
        // With W skew-symmetric every quadratic form vanishes, so ∂V f = 0.
        let gan = GaussianCovarianceGan::new(Matrix::from_diag(&[1.0, 0.04]), 100, 0.0, 2).unwrap();
        let z = Point::new(vec![1.0, 0.0, 0.0, 0.2], vec![0.0, 0.5, -0.5, 0.0]);
        assert!(gan.grad_x(&z).iter().all(|g| g.abs() < 1e-15));
    }
}
