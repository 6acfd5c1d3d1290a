use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use minimax_core::analysis::{asymptotic_rate, FD_STEP_LINEAR};
use minimax_core::linalg::{cg_normal_solve, eig_general, FnOperator, Matrix};
use minimax_core::problems::{sigma_ill_mean, GaussianMeanGan, QuadraticMinimax, SyntheticQuartic};
use minimax_core::{run, Algorithm, MinimaxOracle, Point, SolverSpec, StopCriteria};

fn test_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i == j { 4.0 } else { 1.0 / (1.0 + (i + j) as f64) })
}

fn linalg(c: &mut Criterion) {
    let mut g = c.benchmark_group("linalg");
    for n in [8, 32] {
        let m = test_matrix(n);
        let b = vec![1.0; n];
        let op = FnOperator::new(n, n, |v: &[f64]| m.matvec(v), |w: &[f64]| m.matvec_transpose(w));
        g.bench_with_input(BenchmarkId::new("cg_normal_solve", n), &n, |bch, &n| {
            bch.iter(|| cg_normal_solve(&op, black_box(&b), n, 0.0).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("eig_general", n), &m, |bch, m| bch.iter(|| eig_general(black_box(m)).unwrap()));
    }
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let quartic = SyntheticQuartic;
    let z0 = SyntheticQuartic::initial_point();
    let stop = StopCriteria::for_oracle(&quartic, 100);
    let mut g = c.benchmark_group("quartic_100_iters");
    for alg in [Algorithm::Gda, Algorithm::Tgda, Algorithm::Gdn, Algorithm::Cn] {
        let spec = SolverSpec::new(alg).with_steps(0.05, 0.2);
        g.bench_function(alg.as_str(), |b| b.iter(|| run(&quartic, &spec, black_box(&z0), &stop).unwrap()));
    }
    g.finish();

    let gan = GaussianMeanGan::new(sigma_ill_mean(), 2000, 7).unwrap();
    let start = gan.default_start();
    let stop = StopCriteria::new(20);
    let mut g = c.benchmark_group("gaussian_mean_20_iters");
    for alg in [Algorithm::Gdn, Algorithm::Cn] {
        let spec = SolverSpec::new(alg).with_steps(0.2, 0.0);
        g.bench_function(alg.as_str(), |b| b.iter(|| run(&gan, &spec, black_box(&start), &stop).unwrap()));
    }
    g.finish();
}

fn analysis(c: &mut Criterion) {
    let q = QuadraticMinimax::q1();
    let z = Point::zeros(1, 1);
    let spec = SolverSpec::new(Algorithm::Tgda).with_steps(0.1, 0.25);
    c.bench_function("asymptotic_rate_q1_tgda", |b| b.iter(|| asymptotic_rate(&q, &spec, black_box(&z), FD_STEP_LINEAR).unwrap()));
}

criterion_group!(benches, linalg, solvers, analysis);
criterion_main!(benches);
