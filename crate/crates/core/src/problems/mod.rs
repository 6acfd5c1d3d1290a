//! Benchmark objectives and the name-based registry used by configs.

mod cubic;
mod gaussian_covariance;
mod gaussian_mean;
mod quadratic;
mod quartic;
mod robust_ls;
pub mod sampling;
mod sin_product;

pub use cubic::CubicExample;
pub use gaussian_covariance::{GaussianCovarianceGan, DEFAULT_REGULARIZATION};
pub use gaussian_mean::{population_hessians_gaussian_mean, GaussianMeanGan};
pub use quadratic::QuadraticMinimax;
pub use quartic::SyntheticQuartic;
pub use robust_ls::RobustLeastSquares;
pub use sin_product::SinProduct;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle::MinimaxOracle;

pub const PROBLEM_NAMES: &[&str] = &[
    "quadratic",
    "bilinear",
    "synthetic_quartic",
    "gaussian_mean",
    "gaussian_covariance",
    "sin_product",
    "robust_least_squares",
    "cubic_example",
];

pub const DEFAULT_SAMPLES: usize = 10_000;

/// Well-conditioned and ill-conditioned covariances for the Gaussian GANs.
pub fn sigma_identity() -> Matrix {
    Matrix::identity(2)
}

pub fn sigma_ill_mean() -> Matrix {
    Matrix::from_diag(&[1.0, 0.05])
}

pub fn sigma_ill_covariance() -> Matrix {
    Matrix::from_diag(&[1.0, 0.04])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SigmaParam {
    Named(String),
    Explicit(Vec<Vec<f64>>),
}

fn matrix_param(rows: &[Vec<f64>], path: &str) -> Result<Matrix> {
    Matrix::from_rows(rows).map_err(|e| Error::config(path, e.to_string()))
}

impl SigmaParam {
    fn resolve(&self, path: &str, ill: fn() -> Matrix) -> Result<Matrix> {
        match self {
            SigmaParam::Named(s) => match s.as_str() {
                "identity" | "well" => Ok(sigma_identity()),
                "ill" => Ok(ill()),
                other => Err(Error::config(path, format!("unknown covariance `{other}`; expected identity, ill, or a matrix"))),
            },
            SigmaParam::Explicit(rows) => matrix_param(rows, path),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticParams {
    #[serde(alias = "A")]
    a: Vec<Vec<f64>>,
    #[serde(alias = "B")]
    b: Vec<Vec<f64>>,
    #[serde(alias = "C")]
    c: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BilinearParams {
    #[serde(alias = "C", default = "unit_matrix")]
    c: Vec<Vec<f64>>,
}

fn unit_matrix() -> Vec<Vec<f64>> {
    vec![vec![1.0]]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianMeanParams {
    #[serde(default = "default_sigma")]
    sigma: SigmaParam,
    #[serde(alias = "N", default = "default_samples")]
    n_samples: usize,
}

fn default_sigma() -> SigmaParam {
    SigmaParam::Named("identity".into())
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianCovarianceParams {
    sigma: Option<SigmaParam>,
    #[serde(alias = "N", default = "default_samples")]
    n_samples: usize,
    #[serde(default = "default_regularization")]
    regularization: f64,
}

fn default_regularization() -> f64 {
    DEFAULT_REGULARIZATION
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobustParams {
    #[serde(alias = "N", default = "default_rls_samples")]
    n_samples: usize,
    #[serde(default = "default_rls_dim")]
    dim: usize,
    #[serde(default = "default_rls_rank")]
    feature_rank: usize,
    #[serde(default = "default_rls_gamma")]
    gamma: f64,
}

fn default_rls_samples() -> usize {
    3
}

fn default_rls_dim() -> usize {
    4
}

fn default_rls_rank() -> usize {
    2
}

fn default_rls_gamma() -> f64 {
    5.0
}

fn parse<T: DeserializeOwned>(params: &toml::Table) -> Result<T> {
    serde_path_to_error::deserialize(toml::Value::Table(params.clone())).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { "problem.params".to_string() } else { format!("problem.params.{inner}") };
        Error::config(path, e.into_inner().to_string())
    })
}

fn positive_samples(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::config("problem.params.n_samples", "must be positive"));
    }
    Ok(n)
}

/// Builds a registered problem. `seed` drives any sampled data, so the same
/// `(name, params, seed)` always yields a bitwise-identical oracle.
pub fn make_problem(name: &str, params: &toml::Table, seed: u64) -> Result<Box<dyn MinimaxOracle>> {
    Ok(match name {
        "quadratic" => {
            let p: QuadraticParams = parse(params)?;
            Box::new(QuadraticMinimax::new(
                matrix_param(&p.a, "problem.params.a")?,
                matrix_param(&p.b, "problem.params.b")?,
                matrix_param(&p.c, "problem.params.c")?,
            )?)
        }
        "bilinear" => {
            let p: BilinearParams = parse(params)?;
            Box::new(QuadraticMinimax::bilinear(matrix_param(&p.c, "problem.params.c")?)?)
        }
        "synthetic_quartic" | "quartic" => {
            parse::<NoParams>(params)?;
            Box::new(SyntheticQuartic)
        }
        "sin_product" => {
            parse::<NoParams>(params)?;
            Box::new(SinProduct)
        }
        "cubic_example" => {
            parse::<NoParams>(params)?;
            Box::new(CubicExample)
        }
        "gaussian_mean" => {
            let p: GaussianMeanParams = parse(params)?;
            let sigma = p.sigma.resolve("problem.params.sigma", sigma_ill_mean)?;
            Box::new(GaussianMeanGan::new(sigma, positive_samples(p.n_samples)?, seed).map_err(in_params)?)
        }
        "gaussian_covariance" => {
            let p: GaussianCovarianceParams = parse(params)?;
            let sigma = match &p.sigma {
                Some(s) => s.resolve("problem.params.sigma", sigma_ill_covariance)?,
                None => sigma_ill_covariance(),
            };
            if !(p.regularization >= 0.0) {
                return Err(Error::config("problem.params.regularization", "must be non-negative"));
            }
            Box::new(
                GaussianCovarianceGan::new(sigma, positive_samples(p.n_samples)?, p.regularization, seed)
                    .map_err(in_params)?,
            )
        }
        "robust_least_squares" => {
            let p: RobustParams = parse(params)?;
            Box::new(RobustLeastSquares::new(p.n_samples, p.dim, p.feature_rank, p.gamma, seed)?)
        }
        other => {
            return Err(Error::config(
                "problem.name",
                format!("unknown problem `{other}`; known: {}", PROBLEM_NAMES.join(", ")),
            ))
        }
    })
}

fn in_params(e: Error) -> Error {
    match e {
        Error::Precondition(msg) => Error::config("problem.params.sigma", msg),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Point;

    fn table(src: &str) -> toml::Table {
        src.parse().unwrap()
    }

    #[test]
    fn registry_examples() {
        let q = make_problem("quadratic", &table("A = [[4.0]]\nB = [[-2.0]]\nC = [[2.0]]"), 0).unwrap();
        assert_eq!(q.known_solution(), Some(Point::zeros(1, 1)));

        let g = make_problem("gaussian_mean", &table("sigma = \"ill\"\nN = 100"), 7).unwrap();
        assert_eq!(g.dims(), (2, 2));

        let s = make_problem("sin_product", &toml::Table::new(), 0).unwrap();
        let marks = s.landmarks();
        assert_eq!(marks.len(), 2);
        assert_eq!(marks[1].1, SinProduct::local_minimum());

        assert!(make_problem("gaussian_covariance", &table("N = 10"), 0).unwrap().known_solution().is_none());
        assert_eq!(make_problem("synthetic_quartic", &toml::Table::new(), 0).unwrap().known_solution(), Some(Point::zeros(2, 2)));
    }

    #[test]
    fn registry_errors_name_the_key() {
        let err = make_problem("nope", &toml::Table::new(), 0).unwrap_err();
        assert!(err.to_string().contains("problem.name"), "{err}");
        let err = make_problem("sin_product", &table("extra = 1"), 0).unwrap_err();
        assert!(err.to_string().contains("problem.params"), "{err}");
        let err = make_problem("gaussian_mean", &table("sigma = \"weird\""), 0).unwrap_err();
        assert!(err.to_string().contains("problem.params.sigma"), "{err}");
        let err = make_problem("gaussian_mean", &table("n_samples = -3"), 0).unwrap_err();
        assert!(err.to_string().contains("n_samples"), "{err}");
        let err = make_problem("quadratic", &table("a = [[1.0]]\nb = [[1.0]]\nc = [[0.0]]"), 0).unwrap_err();
        assert!(err.to_string().contains("problem.params.b"), "{err}");
    }
}
