// debug binary
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcp_core::linalg::{ConstraintMatrix, DiagonalVector};
use wcp_core::path::*;
use wcp_core::weights::*;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = 12;
    let n = 3;
    let a =
        ConstraintMatrix::new(DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0_f64))).unwrap();
    let x = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let s = DVector::from_fn(m, |_, _| rng.gen_range(0.5..2.0_f64));
    let b = a.mul(&x) - &s;
    let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
    let wcfg = WeightConfig::from_dims(m, n);
    let ccfg = CenteringConfig::new(&wcfg, m, false);
    println!(
        "K={} r_obs={} mu={} eps={} delta_target={}",
        wcfg.k_budget, ccfg.r_obs, ccfg.mu, ccfg.eps_game, ccfg.delta_target
    );
    let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
    let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
    let w_over_s = DVector::from_fn(m, |i, _| it.w.values()[i] / it.s[i]);
    let c0 = a.transpose_mul(&w_over_s);
    let dir = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let d_raw = centrality(&a, &it, &(c0.clone() + dir.clone())).unwrap();
    let c = c0 + dir * (5e-3 / d_raw);
    let mut cur = it;
    for call in 0..50 {
        cur = centering_inexact(&a, &b, &cur, &c, &wcfg, &ccfg, &mut rng).unwrap();
        let next = centrality(&a, &cur, &c).unwrap();
        let report = centrality_report(&a, &cur, &c, &wcfg, &ccfg).unwrap();
        println!(
            "call {call}: delta {next:.3e} tracking {:.4e} (K {:.4e}) gamma {:.3}",
            report.w_tracking_error, wcfg.k_budget, report.gamma
        );
        if next < 1e-13 {
            break;
        }
    }
}
