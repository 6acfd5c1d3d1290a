use super::Matrix;

/// A matrix-free linear map `R^domain → R^codomain` together with its adjoint.
pub trait LinearOperator {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Vec<f64>;
    fn apply_transpose(&self, w: &[f64]) -> Vec<f64>;
}

impl LinearOperator for Matrix {
    fn domain_dim(&self) -> usize {
        self.cols()
    }

    fn codomain_dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matvec(v)
    }

    fn apply_transpose(&self, w: &[f64]) -> Vec<f64> {
        self.matvec_transpose(w)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (**self).apply(v)
    }

    fn apply_transpose(&self, w: &[f64]) -> Vec<f64> {
        (**self).apply_transpose(w)
    }
}

/// Self-adjoint operator backed by a closure; `apply_transpose` is `apply`.
pub struct SymmetricOperator<F> {
    dim: usize,
    apply: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> SymmetricOperator<F> {
    pub fn new(dim: usize, apply: F) -> Self {
        Self { dim, apply }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> LinearOperator for SymmetricOperator<F> {
    fn domain_dim(&self) -> usize {
        self.dim
    }

    fn codomain_dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (self.apply)(v)
    }

    fn apply_transpose(&self, w: &[f64]) -> Vec<f64> {
        (self.apply)(w)
    }
}

/// General operator backed by a pair of closures.
pub struct FnOperator<F, G> {
    domain: usize,
    codomain: usize,
    apply: F,
    apply_transpose: G,
}

impl<F, G> FnOperator<F, G>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    pub fn new(domain: usize, codomain: usize, apply: F, apply_transpose: G) -> Self {
        Self { domain, codomain, apply, apply_transpose }
    }
}

impl<F, G> LinearOperator for FnOperator<F, G>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn domain_dim(&self) -> usize {
        self.domain
    }

    fn codomain_dim(&self) -> usize {
        self.codomain
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (self.apply)(v)
    }

    fn apply_transpose(&self, w: &[f64]) -> Vec<f64> {
        (self.apply_transpose)(w)
    }
}

/// Densely assembles an operator by applying it to the standard basis.
pub fn assemble(op: &dyn LinearOperator) -> Matrix {
    Matrix::from_columns_of(op.codomain_dim(), op.domain_dim(), |e| op.apply(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector::{axpy, dot, norm, scale};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn dense_operator_reconstructs_columns() {
        let m = Matrix::from_fn(3, 4, |i, j| (i as f64) - 2.0 * (j as f64) + 0.5);
        assert_eq!(assemble(&m), m);
    }

    #[test]
    fn dense_operator_linear_and_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Matrix::from_fn(5, 4, |_, _| rng.gen_range(-2.0..2.0));
        for _ in 0..10 {
            let (u, v) = (random_vec(&mut rng, 4), random_vec(&mut rng, 4));
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let mut comb = scale(a, &u);
            axpy(b, &v, &mut comb);
            let mut lhs = m.apply(&comb);
            axpy(-a, &m.apply(&u), &mut lhs);
            axpy(-b, &m.apply(&v), &mut lhs);
            assert!(norm(&lhs) <= 1e-10 * (a.abs() * norm(&u) + b.abs() * norm(&v)));

            let w = random_vec(&mut rng, 5);
            let l = dot(&m.apply(&u), &w);
            let r = dot(&u, &m.apply_transpose(&w));
            assert!((l - r).abs() <= 1e-10 * l.abs().max(1.0));
        }
    }
}
