//! End-to-end LP solving.
//!
//! The input program `min cᵀx s.t. Ax ≥ b` is embedded in a bounded,
//! strictly feasible extension with one relaxation variable z:
//!
//! ```text
//!   min cᵀx + λ·z
//!   s.t. Ax + z·1 ≥ b,  |xᵢ| ≤ 2B,  0 ≤ z ≤ 2B
//! ```
//!
//! with B a power of two derived from the input encoding size and λ a
//! penalty large enough that z is driven to (near) zero exactly when the
//! input is feasible. The point x = 0, z = B + 1 is strictly interior,
//! so initialization needs no phase-one solve: the path starts at t = 1
//! with a synthetic cost for which that point is exactly central,
//! follows the path down to a tiny t, swaps in the true cost, and then
//! follows the path up until the duality gap bound ‖w‖₁/t certifies the
//! requested accuracy. The final iterate is classified (optimal,
//! infeasible via z, unbounded via the artificial box) and, for optimal
//! instances, rounded onto the active constraint set.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    linear_solve_count, ConstraintMatrix, DiagonalVector, NormalEqFactorization, SolveTolerance,
};
use crate::path::{
    centrality, land_on_path, path_following, CenteringConfig, PathError, PathOptions, PathStats,
    WeightedIterate,
};
use crate::weights::{compute_initial_weight, WeightConfig};

/// An input program `min cᵀx s.t. Ax ≥ b` with no structural
/// assumptions: rows may repeat, the matrix may have zero rows or fewer
/// rows than columns, and the feasible set may be empty or unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLP {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Terminate at a relative duality-gap tolerance.
    Tolerance,
    /// Assume integral data; pick thresholds from the encoding size and
    /// perturb the cost to isolate a unique vertex. Falls back to
    /// tolerance behavior when the encoding size would overflow f64.
    Integral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub mode: SolveMode,
    pub seed: u64,
    pub strict_constants: bool,
    pub max_iters: u64,
    /// t growth aggressiveness; per-iteration factor is 1 + theta/√n.
    pub theta: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            mode: SolveMode::Tolerance,
            seed: 0,
            strict_constants: false,
            max_iters: 2_000_000,
            theta: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Solution in the input coordinates (None unless optimal).
    pub x_star: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Indices of input rows tight at the solution.
    pub active_set: Vec<usize>,
    pub iterations: u64,
    pub linear_solves: u64,
    pub audits: u64,
    pub rollbacks: u64,
    /// Certified bound on cᵀx − OPT of the extended program, in input
    /// cost units.
    pub duality_gap_bound: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl From<PathError> for SolveError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::IterationLimit => SolveError::IterationLimit,
            other => SolveError::NumericalFailure(other.to_string()),
        }
    }
}

/// The extension of a raw program, plus the bookkeeping needed to map
/// results back.
pub struct PreprocessedLP {
    pub a: ConstraintMatrix,
    pub b: DVector<f64>,
    /// Extended cost, scaled (and perturbed in integral mode).
    pub c: DVector<f64>,
    /// Strictly interior starting point (x = 0, z = B + 1).
    pub interior: DVector<f64>,
    pub m_raw: usize,
    pub n_raw: usize,
    /// log2 of the coordinate threshold: box half-width is 2^(l_eff+1).
    pub l_eff: i32,
    pub cost_scale: f64,
    /// True when integral mode fell back to tolerance thresholds.
    pub degraded: bool,
}

fn validate(lp: &RawLP) -> Result<(), SolveError> {
    let (m, n) = lp.a.shape();
    if m == 0 || n == 0 {
        return Err(SolveError::InvalidInput(format!("empty program ({m}x{n})")));
    }
    if lp.b.len() != m || lp.c.len() != n {
        return Err(SolveError::InvalidInput(format!(
            "dimension mismatch: A is {m}x{n}, b has {}, c has {}",
            lp.b.len(),
            lp.c.len()
        )));
    }
    if lp.a.iter().any(|v| !v.is_finite())
        || lp.b.iter().any(|v| !v.is_finite())
        || lp.c.iter().any(|v| !v.is_finite())
    {
        return Err(SolveError::InvalidInput("non-finite entry".into()));
    }
    Ok(())
}

/// Encoding-size exponent: log2(m) plus a Hadamard-style bound on the
/// subdeterminants (product of the n largest row norms, floored at 1)
/// plus the magnitude of b and c.
fn encoding_bits(lp: &RawLP) -> i32 {
    let (m, n) = lp.a.shape();
    let mut row_bits: Vec<f64> = (0..m).map(|i| lp.a.row(i).norm().max(1.0).log2()).collect();
    row_bits.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let hadamard: f64 = row_bits.iter().take(n).sum();
    let max_bc = lp.b.amax().max(lp.c.amax());
    let l = (m as f64).log2() + hadamard + (1.0 + max_bc).log2();
    (l.ceil() as i32).max(1)
}

/// Build the bounded, strictly feasible extension.
pub fn preprocess(
    lp: &RawLP,
    mode: SolveMode,
    tolerance: f64,
) -> Result<PreprocessedLP, SolveError> {
    validate(lp)?;
    let (m, n) = lp.a.shape();
    let l_enc = encoding_bits(lp);
    let mut degraded = false;
    let mut l_eff = match mode {
        SolveMode::Integral => {
            if 3 * l_enc + 4 > 200 {
                degraded = true;
                l_enc.min(16)
            } else {
                l_enc
            }
        }
        // Tolerance mode caps the box: a huge box widens the slack
        // dynamic range, which squares into the normal-equation
        // conditioning for no benefit at a fixed-accuracy stop.
        SolveMode::Tolerance => l_enc.min(16),
    };
    // The interior point needs B + 1 > ‖b‖∞ even after capping.
    let b_bits = (1.0 + 2.0 * lp.b.amax()).log2().ceil() as i32;
    l_eff = l_eff.max(b_bits).max(1);
    let box_bound = (l_eff as f64 + 1.0).exp2();
    let penalty = n as f64 * (3.0 * l_eff as f64 + 4.0).exp2();

    let me = m + 2 * n + 2;
    let ne = n + 1;
    let mut a = DMatrix::zeros(me, ne);
    let mut b = DVector::zeros(me);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = lp.a[(i, j)];
        }
        a[(i, n)] = 1.0;
        b[i] = lp.b[i];
    }
    for j in 0..n {
        a[(m + j, j)] = 1.0;
        b[m + j] = -box_bound;
        a[(m + n + j, j)] = -1.0;
        b[m + n + j] = -box_bound;
    }
    a[(m + 2 * n, n)] = 1.0;
    b[m + 2 * n] = 0.0;
    a[(m + 2 * n + 1, n)] = -1.0;
    b[m + 2 * n + 1] = -box_bound;

    let mut c = DVector::zeros(ne);
    for j in 0..n {
        c[j] = lp.c[j];
    }
    c[n] = penalty;

    let mut interior = DVector::zeros(ne);
    interior[n] = (l_eff as f64).exp2() + 1.0;

    let _ = tolerance;
    Ok(PreprocessedLP {
        a: ConstraintMatrix::new(a).map_err(|e| SolveError::NumericalFailure(e.to_string()))?,
        b,
        c,
        interior,
        m_raw: m,
        n_raw: n,
        l_eff,
        cost_scale: 1.0,
        degraded,
    })
}

/// Integral-mode cost perturbation: scale the whole cost so that vertex
/// objective gaps dwarf the perturbation, then add independent random
/// integers to the x-coordinates to isolate a unique optimal vertex.
pub fn perturb_cost<R: Rng + ?Sized>(pre: &mut PreprocessedLP, rng: &mut R) {
    let n = pre.n_raw;
    let scale = n as f64 * (2.0 * pre.l_eff as f64 + 3.0).exp2();
    let radius = (n as f64 * (pre.l_eff as f64 + 1.0).exp2()) as i64;
    pre.c *= scale;
    for j in 0..n {
        pre.c[j] += rng.gen_range(-radius..=radius) as f64;
    }
    pre.cost_scale = scale;
}

fn dual_norm(
    a: &ConstraintMatrix,
    it: &WeightedIterate,
    v: &DVector<f64>,
) -> Result<f64, SolveError> {
    let m = a.rows();
    let d = DiagonalVector::new(DVector::from_fn(m, |i, _| {
        it.w.values()[i] / (it.s[i] * it.s[i])
    }))
    .map_err(|e| SolveError::NumericalFailure(e.to_string()))?;
    let f = NormalEqFactorization::new(a, &d)
        .map_err(|e| SolveError::NumericalFailure(e.to_string()))?;
    let sol = f.solve(v, SolveTolerance::default());
    Ok(sol.dot(v).max(0.0).sqrt())
}

struct Phases {
    wcfg: WeightConfig,
    ccfg: CenteringConfig,
    popts: PathOptions,
    stats: PathStats,
}

impl Phases {
    fn remaining(&self, opts: &SolveOptions) -> PathOptions {
        let mut p = self.popts.clone();
        p.max_iters = opts.max_iters.saturating_sub(self.stats.iterations);
        p
    }
}

/// Solve a raw program end to end.
pub fn solve(
    lp: &RawLP,
    opts: &SolveOptions,
    mut trace: Option<&mut (dyn Write + '_)>,
) -> Result<SolveReport, SolveError> {
    let solves_before = linear_solve_count();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pre = preprocess(lp, opts.mode, opts.tolerance)?;
    if opts.mode == SolveMode::Integral && !pre.degraded {
        perturb_cost(&mut pre, &mut rng);
    }

    let me = pre.a.rows();
    let ne = pre.a.cols();
    let mut wcfg = WeightConfig::from_dims(me, ne);
    wcfg.strict = opts.strict_constants;
    let ccfg = CenteringConfig::new(&wcfg, me, opts.strict_constants);
    let popts = PathOptions {
        theta: opts.theta,
        // Worst-case cadence audits every step at desk scale; with
        // rollback recovery in place a sparser cadence costs at most a
        // few repeated steps and saves the dominant audit work.
        audit_period: if opts.strict_constants { None } else { Some(4) },
        ..PathOptions::default()
    };
    let mut ph = Phases {
        wcfg,
        ccfg,
        popts,
        stats: PathStats::default(),
    };

    // Phase 0: weights and a synthetic cost making the interior point
    // exactly central at t = 1.
    let s0 = pre.a.mul(&pre.interior) - &pre.b;
    let s0_diag = DiagonalVector::new(s0.clone())
        .map_err(|e| SolveError::NumericalFailure(format!("interior point check: {e}")))?;
    let w0 = compute_initial_weight(&pre.a, &s0_diag, ph.wcfg.k_budget, &ph.wcfg, &mut rng)
        .map_err(|e| SolveError::NumericalFailure(e.to_string()))?;
    let w_over_s = DVector::from_fn(me, |i, _| w0.values()[i] / s0[i]);
    let c_mod = pre.a.transpose_mul(&w_over_s);
    let mut it = WeightedIterate::new(&pre.a, &pre.b, pre.interior.clone(), w0, 1.0)?;

    // Phase 1: walk t down with the synthetic cost until the swap to the
    // true cost cannot disturb centrality by more than the target.
    let delta_target = ph.ccfg.delta_target;
    let mut attempts = 0;
    loop {
        let n_mod = dual_norm(&pre.a, &it, &c_mod)?;
        if it.t * n_mod <= delta_target / 4.0 {
            break;
        }
        attempts += 1;
        if attempts > 400 {
            return Err(SolveError::NumericalFailure(
                "initialization: synthetic-cost phase did not reach a small enough t".into(),
            ));
        }
        let t_next = (delta_target / (8.0 * n_mod)).max(it.t / 256.0);
        if std::env::var_os("WCP_DEBUG_AUDIT").is_some() {
            eprintln!("phase1 chunk: t {:.3e} -> {:.3e} (n_mod {:.3e})", it.t, t_next, n_mod);
        }
        it = path_following(
            &pre.a,
            &pre.b,
            it,
            &c_mod,
            t_next,
            &ph.wcfg,
            &ph.ccfg,
            &ph.remaining(opts),
            &mut ph.stats,
            &mut rng,
            trace.as_deref_mut(),
        )?;
    }

    // Swap in the true cost at a t small enough to stay near-central.
    let mut swap_tries = 0;
    loop {
        let n_true = dual_norm(&pre.a, &it, &pre.c)?;
        if n_true <= 0.0 {
            return Err(SolveError::NumericalFailure(
                "true cost has zero dual norm".into(),
            ));
        }
        let t_swap = delta_target / (4.0 * n_true);
        let mut candidate = it.clone();
        candidate.t = t_swap;
        let delta = centrality(&pre.a, &candidate, &pre.c)?;
        if std::env::var_os("WCP_DEBUG_AUDIT").is_some() {
            eprintln!("swap try: t_swap {:.3e} delta {:.3e} target {:.3e}", t_swap, delta, delta_target);
        }
        if delta <= delta_target {
            it = candidate;
            break;
        }
        swap_tries += 1;
        if swap_tries > 6 {
            return Err(SolveError::NumericalFailure(format!(
                "initialization: cost swap kept delta at {delta:.3e}"
            )));
        }
        it = path_following(
            &pre.a,
            &pre.b,
            it.clone(),
            &c_mod,
            it.t / 16.0,
            &ph.wcfg,
            &ph.ccfg,
            &ph.remaining(opts),
            &mut ph.stats,
            &mut rng,
            trace.as_deref_mut(),
        )?;
    }

    // Phase 2: walk t up with the true cost. After each chunk, exact
    // certificates (a rounded vertex with verified duals, or a Farkas
    // witness built from the iterate's dual estimates) can finish the
    // run early; otherwise it ends at the duality-gap stop. The early
    // exits matter: pushing t to the gap stop squares tiny slacks into
    // the normal-equation conditioning.
    let gap_denominator = |it: &WeightedIterate| pre.cost_scale + pre.c.dot(&it.x).abs();
    let mut chunks = 0;
    loop {
        if let Some(report) = certified_report(lp, &pre, &it, opts, &ph.stats, solves_before) {
            return Ok(report);
        }
        if it.w.l1_norm() / it.t <= opts.tolerance * gap_denominator(&it) {
            break;
        }
        chunks += 1;
        if chunks > 300 {
            return Err(SolveError::NumericalFailure(
                "gap phase did not converge".into(),
            ));
        }
        let needed = it.w.l1_norm() / (opts.tolerance * gap_denominator(&it));
        let t_next = (needed * 1.05).min(it.t * 20.0).max(it.t * 1.5);
        if std::env::var_os("WCP_DEBUG_AUDIT").is_some() {
            eprintln!("phase2 chunk: t {:.3e} -> {:.3e}", it.t, t_next);
        }
        it = match path_following(
            &pre.a,
            &pre.b,
            it.clone(),
            &pre.c,
            t_next,
            &ph.wcfg,
            &ph.ccfg,
            &ph.remaining(opts),
            &mut ph.stats,
            &mut rng,
            trace.as_deref_mut(),
        ) {
            Ok(next) => next,
            Err(PathError::RollbackLoop(t_fail)) if !opts.strict_constants => {
                // Continuation cannot cross a band of t where the path
                // turns numerically singular. Try to land directly at
                // successively larger t beyond the band; the first
                // audited landing resumes the climb, and the next loop
                // pass recomputes the chunk target from there.
                let mut rescued = None;
                let mut t_try = t_fail;
                for _ in 0..10 {
                    t_try *= 16.0;
                    if t_try > needed * 16.0 {
                        break;
                    }
                    let mut cand = it.clone();
                    cand.t = t_try;
                    if land_on_path(&pre.a, &pre.b, &mut cand, &pre.c, &ph.wcfg, &ph.ccfg) {
                        rescued = Some(cand);
                        break;
                    }
                }
                match rescued {
                    Some(cand) => cand,
                    None => return Err(PathError::RollbackLoop(t_fail).into()),
                }
            }
            Err(e) => return Err(e.into()),
        };
    }

    let gap_scaled = it.w.l1_norm() / it.t;
    Ok(classify(
        lp,
        &pre,
        &it,
        opts,
        &ph.stats,
        gap_scaled,
        solves_before,
    ))
}

/// Try to finish the run with an exact certificate at the current
/// iterate. Returns a report only when the conclusion is airtight.
fn certified_report(
    lp: &RawLP,
    pre: &PreprocessedLP,
    it: &WeightedIterate,
    opts: &SolveOptions,
    stats: &PathStats,
    solves_before: u64,
) -> Option<SolveReport> {
    let n = pre.n_raw;
    let b_inf = lp.b.amax();
    let coord_bound = (pre.l_eff as f64).exp2();
    let base = SolveReport {
        status: SolveStatus::Optimal,
        x_star: None,
        objective: None,
        active_set: Vec::new(),
        iterations: stats.iterations,
        linear_solves: linear_solve_count() - solves_before,
        audits: stats.audits,
        rollbacks: stats.rollbacks,
        duality_gap_bound: it.w.l1_norm() / it.t / pre.cost_scale,
    };

    // Farkas witness from the source-row dual estimates y_i = w_i/(t·s_i):
    // if bᵀy exceeds ‖Aᵀy‖₁ times the coordinate bound, no point in the
    // box satisfies all source constraints.
    let y_src = DVector::from_fn(pre.m_raw, |i, _| it.w.values()[i] / (it.t * it.s[i]));
    let residual = lp.a.transpose() * &y_src;
    let margin = lp.b.dot(&y_src) - residual.abs().sum() * coord_bound;
    if margin > 1e-9 * y_src.sum() * (1.0 + b_inf) {
        let mut report = base;
        report.status = SolveStatus::Infeasible;
        return Some(report);
    }

    // Vertex certificate: round, then bound the optimality gap through
    // nonnegative approximate duals supported on the active rows.
    let x = DVector::from_fn(n, |j, _| it.x[j]);
    if x.amax() > coord_bound {
        return None;
    }
    let (x_r, active) = round_to_active_set(lp, &x, opts.tolerance);
    let feas_tol = 1e-9 * (1.0 + b_inf);
    let slack = &lp.a * &x_r - &lp.b;
    if slack.min() < -feas_tol || active.is_empty() {
        return None;
    }
    let a_act = DMatrix::from_fn(n, active.len(), |r, c| lp.a[(active[c], r)]);
    let svd = a_act.clone().svd(true, true);
    let y_act = svd.solve(&lp.c, 1e-12).ok()?;
    let y_clamped = y_act.map(|v| v.max(0.0));
    let dual_residual = &a_act * &y_clamped - &lp.c;
    let dual_value: f64 = active
        .iter()
        .zip(y_clamped.iter())
        .map(|(&i, y)| lp.b[i] * y)
        .sum();
    let objective = lp.c.dot(&x_r);
    // Any feasible x in the box has cᵀx ≥ bᵀy − ‖Aᵀy − c‖₁·bound.
    let gap_bound = objective - dual_value + dual_residual.abs().sum() * coord_bound;
    if gap_bound <= opts.tolerance * (1.0 + objective.abs()) {
        let mut report = base;
        report.objective = Some(objective);
        report.x_star = Some(x_r.iter().copied().collect());
        report.active_set = active;
        report.duality_gap_bound = gap_bound.max(0.0);
        return Some(report);
    }
    None
}

fn classify(
    lp: &RawLP,
    pre: &PreprocessedLP,
    it: &WeightedIterate,
    opts: &SolveOptions,
    stats: &PathStats,
    gap_scaled: f64,
    solves_before: u64,
) -> SolveReport {
    let n = pre.n_raw;
    let z = it.x[n];
    let x = DVector::from_fn(n, |j, _| it.x[j]);
    let b_inf = lp.b.amax();
    let z_threshold = if opts.mode == SolveMode::Integral && !pre.degraded {
        ((-(pre.l_eff as f64)).exp2() / 2.0).max(1e-9)
    } else {
        1e-6 * (1.0 + b_inf)
    };
    let coord_threshold = (pre.l_eff as f64).exp2();

    let mut report = SolveReport {
        status: SolveStatus::Optimal,
        x_star: None,
        objective: None,
        active_set: Vec::new(),
        iterations: stats.iterations,
        linear_solves: linear_solve_count() - solves_before,
        audits: stats.audits,
        rollbacks: stats.rollbacks,
        duality_gap_bound: gap_scaled / pre.cost_scale,
    };
    if z > z_threshold {
        report.status = SolveStatus::Infeasible;
        return report;
    }
    if x.amax() > coord_threshold {
        report.status = SolveStatus::Unbounded;
        return report;
    }
    let (x_final, active) = round_to_active_set(lp, &x, opts.tolerance);
    report.objective = Some(lp.c.dot(&x_final));
    report.x_star = Some(x_final.iter().copied().collect());
    report.active_set = active;
    report
}

/// Snap an approximately optimal point onto its active constraint set:
/// rows with slack below √tol·(1+‖b‖∞) are declared active and the point
/// is replaced by the least-squares solution of the active system when
/// that refinement stays feasible and does not worsen the objective.
/// Ambiguous active systems fall back to the unrefined point.
pub fn round_to_active_set(
    lp: &RawLP,
    x: &DVector<f64>,
    tolerance: f64,
) -> (DVector<f64>, Vec<usize>) {
    let m = lp.a.nrows();
    let threshold = tolerance.sqrt() * (1.0 + lp.b.amax());
    let slack = &lp.a * x - &lp.b;
    let active: Vec<usize> = (0..m).filter(|&i| slack[i] < threshold).collect();
    if active.is_empty() {
        return (x.clone(), active);
    }
    let a_act = DMatrix::from_fn(active.len(), lp.a.ncols(), |r, c| lp.a[(active[r], c)]);
    let b_act = DVector::from_fn(active.len(), |r, _| lp.b[active[r]]);
    let svd = a_act.clone().svd(true, true);
    let refined = match svd.solve(&b_act, 1e-10) {
        Ok(sol) => sol,
        Err(_) => return (x.clone(), active),
    };
    let feas_tol = threshold.max(1e-9 * (1.0 + lp.b.amax()));
    let slack_ref = &lp.a * &refined - &lp.b;
    let feasible = slack_ref.iter().all(|s| *s >= -feas_tol);
    let obj_ok = lp.c.dot(&refined) <= lp.c.dot(x) + threshold * (1.0 + lp.c.amax());
    if feasible && obj_ok && (&a_act * &refined - &b_act).amax() <= feas_tol {
        let slack2 = &lp.a * &refined - &lp.b;
        let active2: Vec<usize> = (0..m).filter(|&i| slack2[i].abs() < threshold).collect();
        (refined, active2)
    } else {
        (x.clone(), active)
    }
}
