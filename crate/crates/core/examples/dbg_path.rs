use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcp_core::linalg::{ConstraintMatrix, DiagonalVector};
use wcp_core::path::*;
use wcp_core::weights::*;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = 20;
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
        "K={:.4e} delta_target={:.4e}",
        wcfg.k_budget, ccfg.delta_target
    );
    let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
    let it0 = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
    let w_over_s = DVector::from_fn(m, |i, _| it0.w.values()[i] / it0.s[i]);
    let c = a.transpose_mul(&w_over_s) + DVector::from_fn(n, |_, _| rng.gen_range(-1e-4..1e-4));
    let mut it = it0;
    let theta: f64 = 0.02;
    let nf = n as f64;
    for iter in 0..30 {
        it.t *= 1.0 + theta / nf.sqrt();
        let d0 = centrality(&a, &it, &c).unwrap();
        let mut rounds_used = 0;
        if d0 > ccfg.delta_target {
            it = centering_inexact(&a, &b, &it, &c, &wcfg, &ccfg, &mut rng).unwrap();
            'outer: for round in 0..20 {
                rounds_used = round + 1;
                let mut k = 0;
                loop {
                    let d = centrality(&a, &it, &c).unwrap();
                    if d <= ccfg.delta_target {
                        break;
                    }
                    if k > 60 {
                        println!("polish stalled d={d:.3e}");
                        break;
                    }
                    it = r_step(&a, &b, &it, &c, 0.0, ccfg.gamma_bound).unwrap();
                    k += 1;
                }
                let sd = it.slack_diagonal();
                let z = compute_weight(&a, &sd, &it.w, ccfg.r_obs, &wcfg, &mut rng).unwrap();
                let psi_inf =
                    it.w.values()
                        .iter()
                        .zip(z.values().iter())
                        .map(|(wi, zi)| (zi / wi).ln().abs())
                        .fold(0.0_f64, f64::max);
                if round >= 6 {
                    println!("  round {round}: psi={psi_inf:.3e}");
                }
                if psi_inf <= 0.25 * wcfg.k_budget {
                    break 'outer;
                }
                let wn = DVector::from_fn(it.w.len(), |i, _| {
                    it.w.values()[i] * (0.5 * (z.values()[i] / it.w.values()[i]).ln()).exp()
                });
                it = WeightedIterate::new(
                    &a,
                    &b,
                    it.x.clone(),
                    WeightVector::new(wn).unwrap(),
                    it.t,
                )
                .unwrap();
            }
        }
        let rep = centrality_report(&a, &it, &c, &wcfg, &ccfg).unwrap();
        println!(
            "iter {iter}: t={:.4} rounds={rounds_used} delta={:.3e} track={:.3e} phi={:.3e}",
            it.t, rep.delta_t, rep.w_tracking_error, rep.phi
        );
    }
}
