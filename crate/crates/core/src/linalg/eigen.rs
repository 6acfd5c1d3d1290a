//! Dense eigensolvers for the small matrices that show up in rate analysis.
//!
//! Symmetric matrices use cyclic Jacobi rotations. General matrices are
//! reduced to upper Hessenberg form by Householder reflections and then
//! driven to real Schur form with Francis double-shift QR sweeps.

use num_complex::Complex64;

use super::{LinalgError, Matrix};

const JACOBI_MAX_SWEEPS: usize = 100;

/// QR sweeps allowed per unit of dimension before giving up.
pub const QR_SWEEPS_PER_DIM: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub fn eig_symmetric(m: &Matrix) -> Result<Vec<f64>, LinalgError> {
    Ok(eigh(m)?.values)
}

pub fn eigh(m: &Matrix) -> Result<SymmetricEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite { context: "eig_symmetric" });
    }
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// All eigenvalues of a general square matrix. Complex pairs are returned
/// adjacent, positive imaginary part first.
pub fn eig_general(m: &Matrix) -> Result<Vec<Complex64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite { context: "eig_general" });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg_reduce(&mut h);
    hessenberg_qr(&mut h)
}

/// `max |λ|` over the spectrum.
pub fn spectral_radius(m: &Matrix) -> Result<f64, LinalgError> {
    Ok(eig_general(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigenvalue moduli in ascending order.
pub fn sorted_moduli(m: &Matrix) -> Result<Vec<f64>, LinalgError> {
    let mut mods: Vec<f64> = eig_general(m)?.iter().map(|z| z.norm()).collect();
    mods.sort_by(f64::total_cmp);
    Ok(mods)
}

fn hessenberg_reduce(h: &mut Matrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * h[(i, j)]).sum::<f64>() / hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * h[(i, j)]).sum::<f64>() / hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
        for i in (m + 1)..=high {
            h[(i, m - 1)] = 0.0;
        }
    }
}

#[allow(clippy::many_single_char_names)]
fn hessenberg_qr(h: &mut Matrix) -> Result<Vec<Complex64>, LinalgError> {
    let nn = h.rows();
    let eps = f64::EPSILON;
    let mut re = vec![0.0; nn];
    let mut im = vec![0.0; nn];
    let mut exshift = 0.0;
    let (mut p, mut q, mut r) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut s, mut z);
    let (mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let cap = QR_SWEEPS_PER_DIM * nn;
    let mut total_sweeps = 0usize;
    let mut iter = 0usize;
    let mut n = nn as isize - 1;
    let low: isize = 0;

    while n >= low {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = h[(lu - 1, lu - 1)].abs() + h[(lu, lu)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(lu, lu - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root.
            re[nu] = h[(nu, nu)] + exshift;
            im[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots.
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(nu, nu)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = re[nu - 1];
                if z != 0.0 {
                    re[nu] = x - w / z;
                }
                im[nu - 1] = 0.0;
                im[nu] = 0.0;
            } else {
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            total_sweeps += 1;
            if total_sweeps > cap {
                return Err(LinalgError::NoConvergence { iterations: total_sweeps - 1 });
            }
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in (low as usize)..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in (low as usize)..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = n - 2;
            while m >= l {
                let mu = m as usize;
                z = h[(mu, mu)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - r - s;
                r = h[(mu + 2, mu + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h[(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h[(mu - 1, mu - 1)].abs() + z.abs() + h[(mu + 1, mu + 1)].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in (mu + 2)..=nu {
                h[(i, i - 2)] = 0.0;
                if i > mu + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            let mut k = mu;
            while k < nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            pp += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= pp * z;
                        }
                        h[(k, j)] -= pp * x;
                        h[(k + 1, j)] -= pp * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            pp += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= pp * r;
                        }
                        h[(i, k)] -= pp;
                        h[(i, k + 1)] -= pp * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_by_re_im(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(eig_symmetric(&Matrix::identity(3)).unwrap(), vec![1.0, 1.0, 1.0]);
        let d = eig_symmetric(&Matrix::from_diag(&[1.0, 0.04])).unwrap();
        assert_eq!(d, vec![0.04, 1.0]);
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = eig_symmetric(&m).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(eig_symmetric(&m), Err(LinalgError::NotSymmetric)));
    }

    #[test]
    fn symmetric_residuals_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [1, 2, 5, 9] {
            let g = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = g.add(&g.transpose());
            let eig = eigh(&m).unwrap();
            let sum: f64 = eig.values.iter().sum();
            assert!((sum - m.trace()).abs() <= 1e-10 * m.trace().abs().max(1.0));
            for (k, lambda) in eig.values.iter().enumerate() {
                let v = eig.vectors.column(k);
                let mv = m.matvec(&v);
                let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
                assert!(res < 1e-8, "residual {res}");
            }
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn general_examples() {
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let e = sorted_by_re_im(eig_general(&rot).unwrap());
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);

        let tri = Matrix::from_rows(&[vec![2.0, 5.0], vec![0.0, 3.0]]).unwrap();
        let e = sorted_by_re_im(eig_general(&tri).unwrap());
        assert!((e[0].re - 2.0).abs() < 1e-14 && (e[1].re - 3.0).abs() < 1e-14);

        // companion matrix of λ³ − 6λ² + 11λ − 6
        let comp = Matrix::from_rows(&[vec![6.0, -11.0, 6.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let e = sorted_by_re_im(eig_general(&comp).unwrap());
        for (ev, target) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ev.re - target).abs() < 1e-10 && ev.im.abs() < 1e-10, "{e:?}");
        }
    }

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&Matrix::identity(4)).unwrap() - 1.0).abs() < 1e-15);
        let alpha = 0.1;
        let m = Matrix::from_rows(&[vec![1.0, -alpha], vec![alpha, 1.0]]).unwrap();
        assert!((spectral_radius(&m).unwrap() - 1.01_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn product_of_eigenvalues_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [3, 4, 7, 12, 20] {
            let m = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let eig = eig_general(&m).unwrap();
            assert_eq!(eig.len(), n);
            let prod = eig.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc * z);
            let det = determinant(&m).unwrap();
            assert!((prod.re - det).abs() <= 1e-8 * det.abs().max(1e-3), "n={n}: {prod} vs {det}");
            assert!(prod.im.abs() <= 1e-8 * det.abs().max(1e-3));
            let sum: f64 = eig.iter().map(|z| z.re).sum();
            assert!((sum - m.trace()).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_and_general_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = Matrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        let m = g.add(&g.transpose());
        let mut general: Vec<f64> = eig_general(&m).unwrap().iter().map(|z| z.re).collect();
        general.sort_by(f64::total_cmp);
        for (a, b) in general.iter().zip(eig_symmetric(&m).unwrap()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
