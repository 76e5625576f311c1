use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcp_core::driver::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let m: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let integral = args.get(3).map(|s| s == "int").unwrap_or(true);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
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
    let lp = RawLP { a, b, c };
    let opts = SolveOptions {
        mode: if integral {
            SolveMode::Integral
        } else {
            SolveMode::Tolerance
        },
        ..Default::default()
    };
    let mut out = std::io::stderr();
    match solve(&lp, &opts, Some(&mut out)) {
        Ok(r) => println!(
            "OK {:?} obj={:?} x={:?} iters={} solves={}",
            r.status, r.objective, r.x_star, r.iterations, r.linear_solves
        ),
        Err(e) => println!("ERR {e}"),
    }
}
