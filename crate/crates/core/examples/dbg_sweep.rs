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
    let t_all = Instant::now();
    let mut fails = 0;
    let mut total_iters = 0u64;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed * 7 + 1);
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(2 * n + 1..=30);
        let lp = random_lp(m, n, seed);
        let opts = SolveOptions {
            mode: SolveMode::Integral,
            seed,
            ..Default::default()
        };
        let t0 = Instant::now();
        match solve(&lp, &opts, None) {
            Ok(r) => {
                let dt = t0.elapsed().as_secs_f64();
                worst = worst.max(dt);
                total_iters += r.iterations;
                if dt > 3.0 {
                    println!("slow seed={seed} {m}x{n}: {:.2}s {:?}", dt, r.status);
                }
            }
            Err(e) => {
                fails += 1;
                println!("FAIL seed={seed} {m}x{n}: {e}");
            }
        }
    }
    println!(
        "total {:.1}s, fails {fails}, worst {:.2}s, mean iters {}",
        t_all.elapsed().as_secs_f64(),
        worst,
        total_iters / 100
    );
}
