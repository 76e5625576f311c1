//! Generators and reference oracles shared by the integration suites.
//!
//! Everything here is deliberately slow and obvious: exhaustive vertex
//! enumeration, subset search for the ball/box maximizer, projected
//! gradient with Dykstra projections. The solver under test must agree
//! with these, not the other way around.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcp_core::driver::RawLP;
use wcp_core::{ConstraintMatrix, DiagonalVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw (m, n) the same way the seeded correctness sweep does.
pub fn sweep_shape(seed: u64) -> (usize, usize) {
    let mut r = rng(seed * 7 + 1);
    let n = r.gen_range(2..=6);
    let m = r.gen_range(2 * n + 1..=30);
    (m, n)
}

/// Bounded feasible LP with integral data: a +-5 box on every variable
/// plus random rows cut to pass strictly below an integer interior
/// point, so the feasible region is nonempty and compact by
/// construction.
pub fn bounded_lp(m: usize, n: usize, seed: u64) -> RawLP {
    bounded_lp_with_interior(m, n, seed).0
}

/// Same as [`bounded_lp`], also returning the strictly interior point
/// the cuts were placed around (every slack there is at least 1).
pub fn bounded_lp_with_interior(m: usize, n: usize, seed: u64) -> (RawLP, DVector<f64>) {
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
    (RawLP { a, b, c }, x0)
}

/// A random constraint matrix (full column rank almost surely) and a
/// positive slack vector, for exercising the weight function and the
/// linear algebra away from any particular LP.
pub fn random_system(m: usize, n: usize, seed: u64) -> (ConstraintMatrix, DiagonalVector) {
    let mut r = rng(seed);
    loop {
        let a = DMatrix::from_fn(m, n, |_, _| r.gen_range(-1.0..1.0));
        let s = DVector::from_fn(m, |_, _| r.gen_range(0.1..10.0));
        if let Ok(cm) = ConstraintMatrix::new(a) {
            return (cm, DiagonalVector::new(s).unwrap());
        }
    }
}

pub struct VertexOptimum {
    pub objective: f64,
    pub x: DVector<f64>,
    /// Rows tight at the optimal vertex.
    pub active: Vec<usize>,
    /// No other feasible vertex (at a distinct point) attains an
    /// objective within the tie tolerance.
    pub unique: bool,
}

/// Exhaustive enumeration of basic feasible solutions: every n-subset
/// of rows is solved as a square system and checked for feasibility.
pub fn enumerate_feasible_vertices(lp: &RawLP) -> Vec<DVector<f64>> {
    let m = lp.a.nrows();
    let n = lp.a.ncols();
    let feas_tol = 1e-9 * (1.0 + lp.b.amax());
    let mut vertices = Vec::new();

    let mut idx: Vec<usize> = (0..n).collect();
    'outer: loop {
        let a_sub = DMatrix::from_fn(n, n, |r, c| lp.a[(idx[r], c)]);
        let b_sub = DVector::from_fn(n, |r, _| lp.b[idx[r]]);
        if let Some(x) = a_sub.lu().solve(&b_sub) {
            if x.iter().all(|v| v.is_finite()) {
                let slack = &lp.a * &x - &lp.b;
                if slack.iter().all(|s| *s >= -feas_tol) {
                    vertices.push(x);
                }
            }
        }
        // next lexicographic n-combination of 0..m
        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if idx[k] != k + m - n {
                idx[k] += 1;
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
    vertices
}

/// Best vertex under a given cost, with a uniqueness flag (no vertex at
/// a distinct point comes within the tie tolerance).
pub fn vertex_optimum(
    lp: &RawLP,
    c: &DVector<f64>,
    vertices: &[DVector<f64>],
) -> Option<VertexOptimum> {
    let m = lp.a.nrows();
    let tie_tol = 1e-7;
    let (objective, x) = vertices
        .iter()
        .map(|x| (c.dot(x), x))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|(o, x)| (o, x.clone()))?;
    let unique = vertices.iter().all(|v| {
        (v - &x).amax() <= 1e-7 || c.dot(v) > objective + tie_tol * (1.0 + objective.abs())
    });
    let thresh = 1e-6 * (1.0 + lp.b.amax());
    let slack = &lp.a * &x - &lp.b;
    let active = (0..m).filter(|&i| slack[i].abs() <= thresh).collect();
    Some(VertexOptimum { objective, x, active, unique })
}

/// Convenience wrapper: enumerate and optimize under the instance cost.
pub fn enumerate_optimum(lp: &RawLP) -> Option<VertexOptimum> {
    vertex_optimum(lp, &lp.c, &enumerate_feasible_vertices(lp))
}

/// Exact maximizer of <a, x> over the unit ball intersected with the
/// box |x_i| <= l_i, by trying every subset of coordinates as the
/// clamped set. The optimum clamps some coordinates to their box bound
/// and scales the rest proportionally to a, so it is among these
/// candidates.
pub fn subset_maximizer(a: &DVector<f64>, l: &DVector<f64>) -> DVector<f64> {
    let m = a.len();
    let u = a / a.norm();
    let mut best_obj = f64::NEG_INFINITY;
    let mut best = DVector::zeros(m);
    for mask in 0u32..(1 << m) {
        let mut sl2 = 0.0;
        let mut su2 = 0.0;
        for i in 0..m {
            if mask & (1 << i) != 0 {
                sl2 += l[i] * l[i];
            } else {
                su2 += u[i] * u[i];
            }
        }
        if sl2 > 1.0 + 1e-12 {
            continue;
        }
        let scale = if su2 > 1e-300 {
            ((1.0 - sl2).max(0.0) / su2).sqrt()
        } else {
            0.0
        };
        let x = DVector::from_fn(m, |i, _| {
            if mask & (1 << i) != 0 {
                u[i].signum() * l[i]
            } else {
                scale * u[i]
            }
        });
        if (0..m).any(|i| x[i].abs() > l[i] + 1e-9) || x.norm() > 1.0 + 1e-9 {
            continue;
        }
        let obj = a.dot(&x);
        if obj > best_obj {
            best_obj = obj;
            best = x;
        }
    }
    best
}

/// Euclidean projection onto ball /\ box, from the KKT system: the
/// projection of v is clamp(v/(1+lambda), +-l) where lambda >= 0 is the
/// multiplier of the ball constraint, found by bisection on the
/// monotone norm residual.
fn project_intersection(v: &DVector<f64>, l: &DVector<f64>) -> DVector<f64> {
    let m = v.len();
    let clamp = |lambda: f64| {
        DVector::from_fn(m, |i, _| (v[i] / (1.0 + lambda)).clamp(-l[i], l[i]))
    };
    let plain = clamp(0.0);
    if plain.norm() <= 1.0 {
        return plain;
    }
    let mut lo = 0.0;
    let mut hi = v.norm();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clamp(mid).norm() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clamp(hi)
}

/// Projected-gradient ascent for max <a, x> over ball /\ box. Slow but
/// independent of any clamp-and-scale reasoning.
pub fn projected_gradient_maximizer(a: &DVector<f64>, l: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(a.len());
    let eta = 0.5 / a.norm();
    for _ in 0..50_000 {
        let next = project_intersection(&(&x + a * eta), l);
        let moved = (&next - &x).amax();
        x = next;
        if moved < 1e-14 {
            break;
        }
    }
    x
}

/// Least-squares slope of y against x.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
