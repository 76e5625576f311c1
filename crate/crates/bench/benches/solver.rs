use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wcp_core::driver::{solve, RawLP, SolveOptions};
use wcp_core::linalg::{exact_leverage_scores, ConstraintMatrix, DiagonalVector};
use wcp_core::smoothing::project_onto_ball_box;

fn random_lp(m: usize, n: usize, seed: u64) -> RawLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Box rows keep the instance bounded; the rest pass through a known
    // interior point so the instance is feasible by construction.
    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
    for j in 0..n {
        a[(j, j)] = 1.0;
        b[j] = -5.0;
        a[(n + j, j)] = -1.0;
        b[n + j] = -5.0;
    }
    for i in 2 * n..m {
        for j in 0..n {
            a[(i, j)] = rng.gen_range(-1.0..1.0);
        }
        b[i] = a.row(i).transpose().dot(&x0) - rng.gen_range(0.5..2.0);
    }
    let c = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    RawLP { a, b, c }
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (m, n) in [(12, 3), (32, 4)] {
        let lp = random_lp(m, n, 42);
        group.bench_with_input(BenchmarkId::new("lp", format!("{m}x{n}")), &lp, |bch, lp| {
            bch.iter(|| solve(lp, &SolveOptions::default(), None).unwrap());
        });
    }
    group.finish();
}

fn bench_leverage(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = ConstraintMatrix::new(DMatrix::from_fn(200, 20, |_, _| rng.gen_range(-1.0..1.0_f64)))
        .unwrap();
    let d = DiagonalVector::new(DVector::from_fn(200, |_, _| rng.gen_range(0.5..2.0))).unwrap();
    c.bench_function("exact_leverage_200x20", |bch| {
        bch.iter(|| exact_leverage_scores(&a, &d).unwrap());
    });
}

fn bench_projection(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = DVector::from_fn(1000, |_, _| rng.gen_range(-1.0..1.0_f64));
    let l = DVector::from_fn(1000, |_, _| rng.gen_range(0.01..0.1));
    c.bench_function("ball_box_projection_1000", |bch| {
        bch.iter(|| project_onto_ball_box(&u, &l).unwrap());
    });
}

criterion_group!(benches, bench_solve, bench_leverage, bench_projection);
criterion_main!(benches);
