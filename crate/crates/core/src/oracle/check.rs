//! Central-difference validation of analytic gradients and Hessian-vector products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MinimaxOracle, Point};
use crate::linalg::vector::{norm, sub};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Random unit directions probed per Hessian block.
const HVP_PROBES: usize = 3;

/// Denominator floor so that near-zero blocks are compared in absolute terms.
const SCALE_FLOOR: f64 = 1e-6;

/// Maximum relative error per derivative block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub grad_x: f64,
    pub grad_y: f64,
    pub hvp_xx: f64,
    pub hvp_xy: f64,
    pub hvp_yx: f64,
    pub hvp_yy: f64,
}

impl DerivativeReport {
    pub fn max(&self) -> f64 {
        [self.grad_x, self.grad_y, self.hvp_xx, self.hvp_xy, self.hvp_yx, self.hvp_yy]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn blocks(&self) -> [(&'static str, f64); 6] {
        [
            ("grad_x", self.grad_x),
            ("grad_y", self.grad_y),
            ("hvp_xx", self.hvp_xx),
            ("hvp_xy", self.hvp_xy),
            ("hvp_yx", self.hvp_yx),
            ("hvp_yy", self.hvp_yy),
        ]
    }
}

fn rel_error(analytic: &[f64], fd: &[f64]) -> f64 {
    let scale = norm(fd).max(norm(analytic)).max(SCALE_FLOOR);
    norm(&sub(analytic, fd)) / scale
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = norm(&v);
        if len > 1e-3 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

fn shifted(z: &Point, dx: &[f64], dy: &[f64], t: f64) -> Point {
    Point::new(
        z.x.iter().zip(dx).map(|(a, b)| a + t * b).collect(),
        z.y.iter().zip(dy).map(|(a, b)| a + t * b).collect(),
    )
}

/// `count` seeded points scattered with standard deviation `spread` around
/// the known solution, or around the default start when there is none.
pub fn sample_points(oracle: &dyn MinimaxOracle, seed: u64, count: usize, spread: f64) -> Vec<Point> {
    let center = oracle.known_solution().unwrap_or_else(|| oracle.default_start());
    let mut stream = crate::problems::sampling::GaussianStream::new(seed);
    (0..count)
        .map(|_| {
            let dx = stream.normal_vec(center.x.len(), spread);
            let dy = stream.normal_vec(center.y.len(), spread);
            shifted(&center, &dx, &dy, 1.0)
        })
        .collect()
}

/// Compares the oracle's gradients against central differences of `value`
/// and each HVP against central differences of the matching gradient along
/// random unit directions. `seed` fixes the directions.
pub fn check_derivatives(oracle: &dyn MinimaxOracle, z: &Point, h: f64, seed: u64) -> DerivativeReport {
    let (n, m) = oracle.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_x = vec![0.0; n];
    let zero_y = vec![0.0; m];

    let fd_grad = |along_x: bool, dim: usize| -> Vec<f64> {
        (0..dim)
            .map(|j| {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                let (dx, dy) = if along_x { (&e, &zero_y) } else { (&zero_x, &e) };
                (oracle.value(&shifted(z, dx, dy, h)) - oracle.value(&shifted(z, dx, dy, -h))) / (2.0 * h)
            })
            .collect()
    };
    let grad_x = rel_error(&oracle.grad_x(z), &fd_grad(true, n));
    let grad_y = rel_error(&oracle.grad_y(z), &fd_grad(false, m));

    let mut worst = [0.0_f64; 4];
    for _ in 0..HVP_PROBES {
        let u = unit_direction(&mut rng, n);
        let v = unit_direction(&mut rng, m);
        let (zxp, zxm) = (shifted(z, &u, &zero_y, h), shifted(z, &u, &zero_y, -h));
        let (zyp, zym) = (shifted(z, &zero_x, &v, h), shifted(z, &zero_x, &v, -h));
        let diff = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> { a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect() };

        let fd_xx = diff(oracle.grad_x(&zxp), oracle.grad_x(&zxm));
        let fd_xy = diff(oracle.grad_x(&zyp), oracle.grad_x(&zym));
        let fd_yx = diff(oracle.grad_y(&zxp), oracle.grad_y(&zxm));
        let fd_yy = diff(oracle.grad_y(&zyp), oracle.grad_y(&zym));
        let errs = [
            rel_error(&oracle.hvp_xx(z, &u), &fd_xx),
            rel_error(&oracle.hvp_xy(z, &v), &fd_xy),
            rel_error(&oracle.hvp_yx(z, &u), &fd_yx),
            rel_error(&oracle.hvp_yy(z, &v), &fd_yy),
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }

    DerivativeReport { grad_x, grad_y, hvp_xx: worst[0], hvp_xy: worst[1], hvp_yx: worst[2], hvp_yy: worst[3] }
}
