use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcp_core::smoothing::project_onto_ball_box;

fn project_intersection(v: &DVector<f64>, l: &DVector<f64>) -> DVector<f64> {
    let m = v.len();
    let mut y = v.clone();
    let mut p = DVector::zeros(m);
    let mut q = DVector::zeros(m);
    for _ in 0..500 {
        let t = &y + &p;
        let boxed = DVector::from_fn(m, |i, _| t[i].clamp(-l[i], l[i]));
        p = t - &boxed;
        let t2 = &boxed + &q;
        let norm = t2.norm();
        let balled = if norm > 1.0 { &t2 / norm } else { t2.clone() };
        q = t2 - &balled;
        let moved = (&balled - &y).amax();
        y = balled;
        if moved < 1e-14 {
            break;
        }
    }
    y
}

fn pg(a: &DVector<f64>, l: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(a.len());
    let eta = 0.5 / a.norm();
    for _ in 0..20_000 {
        let next = project_intersection(&(&x + a * eta), l);
        let moved = (&next - &x).amax();
        x = next;
        if moved < 1e-13 {
            break;
        }
    }
    x
}

fn main() {
    let mut r = ChaCha8Rng::seed_from_u64(77);
    for case in 0..1000u32 {
        let m = r.gen_range(1..=12);
        let a = loop {
            let a = DVector::from_fn(m, |_, _| r.gen_range(-1.0..1.0));
            if a.norm() > 1e-6 {
                break a;
            }
        };
        let l = DVector::from_fn(m, |_, _| {
            if r.gen_bool(0.1) {
                f64::INFINITY
            } else {
                r.gen_range(0.05..1.5)
            }
        });
        let got = project_onto_ball_box(&a, &l).unwrap();
        let x_pg = pg(&a, &l);
        let diff = (a.dot(&got) - a.dot(&x_pg)).abs();
        if diff > 1e-6 {
            println!("case {case} m={m} diff={diff:.3e}");
            println!("  a = {:?}", a.as_slice());
            println!("  l = {:?}", l.as_slice());
            println!("  impl = {:?}", got.as_slice());
            println!("  pg   = {:?}", x_pg.as_slice());
            println!("  |impl| = {}, |pg| = {}", got.norm(), x_pg.norm());
        }
    }
}
