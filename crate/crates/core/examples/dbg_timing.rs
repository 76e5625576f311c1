use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use wcp_core::driver::*;

fn random_lp(m: usize, n: usize, seed: u64) -> RawLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-2..3) as f64);
    for j in 0..n {
        a[(j, j)] = 1.0;
        b[j] = -5.0;
        a[(n + j, j)] = -1.0;
        b[n + j] = -5.0;
    }
    for i in 2 * n..m {
        for j in 0..n {
            a[(i, j)] = rng.gen_range(-3..4) as f64;
        }
        b[i] = a.row(i).transpose().dot(&x0) - rng.gen_range(1..4) as f64;
    }
    let c = DVector::from_fn(n, |_, _| rng.gen_range(-3..4) as f64);
    RawLP { a, b, c }
}

fn main() {
    for (m, n, mode) in [
        (10, 3, SolveMode::Integral),
        (12, 3, SolveMode::Integral),
        (32, 4, SolveMode::Tolerance),
        (64, 8, SolveMode::Tolerance),
    ] {
        let lp = random_lp(m, n, 42);
        let t0 = Instant::now();
        let opts = SolveOptions {
            mode,
            ..Default::default()
        };
        match solve(&lp, &opts, None) {
            Ok(r) => println!("{m}x{n} {mode:?}: {:?} obj={:?} iters={} solves={} audits={} rollbacks={} in {:.2}s",
                r.status, r.objective, r.iterations, r.linear_solves, r.audits, r.rollbacks, t0.elapsed().as_secs_f64()),
            Err(e) => println!("{m}x{n} {mode:?}: ERROR {e} in {:.2}s", t0.elapsed().as_secs_f64()),
        }
    }
}
