//! Weighted central-path machinery: Newton steps, centrality, r-steps,
//! exact and inexact centering, and the path-following loop with
//! invariant audits and rollback.
//!
//! The path for parameter t is the set of minimizers of the penalized
//! objective f_t(x,w) = t·cᵀx − Σ wᵢ log sᵢ at the weight-function
//! weights w = g(s). Progress along the path multiplies t by a fixed
//! factor per iteration; each iteration re-centers with an r-step that
//! splits one Newton step between the point and a multiplicative weight
//! update, then corrects the weights toward a sketched estimate of g(s)
//! with the smoothing machinery.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    slack_sensitivity, ConstraintMatrix, DiagonalVector, LinalgError, NormalEqFactorization,
    SolveTolerance,
};
use crate::smoothing::{chasing_zero_move, potential, MoveSet, PotentialConfig, SmoothingError};
use crate::weights::{
    compute_weight, exact_weight, exact_weight_detailed, weight_jacobian_at, WeightConfig,
    WeightError, WeightVector,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PathError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
    #[error("iterate left the strict interior (slack {slack:.3e} at row {row})")]
    NonInterior { row: usize, slack: f64 },
    #[error("step too large: delta*gamma = {0:.3e} exceeds 1/8")]
    StepTooLarge(f64),
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("repeated rollbacks made no progress at t = {0:.6e}")]
    RollbackLoop(f64),
    #[error("centering failed to reach the target centrality (delta = {0:.3e})")]
    CenteringStalled(f64),
}

/// Current point, weights, slacks and path parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIterate {
    pub x: DVector<f64>,
    pub w: WeightVector,
    pub t: f64,
    pub s: DVector<f64>,
}

impl WeightedIterate {
    /// Build an iterate, verifying strict interiority.
    pub fn new(
        a: &ConstraintMatrix,
        b: &DVector<f64>,
        x: DVector<f64>,
        w: WeightVector,
        t: f64,
    ) -> Result<Self, PathError> {
        let s = a.mul(&x) - b;
        check_interior(&s)?;
        Ok(Self { x, w, t, s })
    }

    pub fn slack_diagonal(&self) -> DiagonalVector {
        DiagonalVector::new(self.s.clone()).expect("slacks positive by invariant")
    }
}

fn check_interior(s: &DVector<f64>) -> Result<(), PathError> {
    for (i, si) in s.iter().enumerate() {
        if !(si.is_finite() && *si > 0.0) {
            return Err(PathError::NonInterior { row: i, slack: *si });
        }
    }
    Ok(())
}

/// Derived constants for one inexact-centering step.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringConfig {
    /// Weight-tracking budget (ℓ∞ in log-weight space).
    pub k_budget: f64,
    /// Accuracy demanded of the sketched weight estimate.
    pub r_obs: f64,
    /// Player's step inflation in the tracking game.
    pub eps_game: f64,
    /// Potential sharpness μ = eps_game/(12·r_obs).
    pub mu: f64,
    /// Centrality threshold maintained by the path loop.
    pub delta_target: f64,
    /// Budget for the tracking potential Φ_μ(log g − log w).
    pub phi_budget: f64,
    /// γ bound used in step preconditions (c_γ·e^K); audits recompute γ
    /// exactly.
    pub gamma_bound: f64,
    pub strict: bool,
}

impl CenteringConfig {
    pub fn new(wcfg: &WeightConfig, m: usize, strict: bool) -> Self {
        let mf = m as f64;
        let k = wcfg.k_budget;
        let log_term = (960.0 * wcfg.c_r * wcfg.c_gamma * mf.powf(1.5)).ln();
        let r_obs = k / (60.0 * wcfg.c_r * log_term);
        let eps_game = 1.0 / (5.0 * wcfg.c_r);
        let delta_paper = k / (240.0 * wcfg.c_r * wcfg.c_gamma * log_term);
        let delta_target = if strict {
            delta_paper
        } else {
            (delta_paper * 1e3).min(0.05 / (wcfg.c_gamma * wcfg.c_r))
        };
        Self {
            k_budget: k,
            r_obs,
            eps_game,
            mu: eps_game / (12.0 * r_obs),
            delta_target,
            phi_budget: 960.0 * wcfg.c_r * wcfg.c_gamma * mf.powf(1.5),
            gamma_bound: wcfg.c_gamma * k.exp(),
            strict,
        }
    }

    pub fn potential_config(&self) -> PotentialConfig {
        PotentialConfig {
            mu: self.mu,
            r_obs: self.r_obs,
            eps_game: self.eps_game,
        }
    }
}

/// Exact audit of one iterate: centrality, slack sensitivity, tracking
/// error against the exactly computed weight function, and the tracking
/// potential.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub delta_t: f64,
    pub gamma: f64,
    pub phi: f64,
    pub w_tracking_error: f64,
    /// Margin to allow on tracking checks when the weight computation
    /// bottomed out at its rounding-noise floor (0 when it converged).
    pub noise_floor: f64,
}

/// f_t(x,w) = t·cᵀx − Σ wᵢ log sᵢ.
pub fn penalized_objective(it: &WeightedIterate, c: &DVector<f64>) -> Result<f64, PathError> {
    check_interior(&it.s)?;
    let barrier: f64 =
        it.w.values()
            .iter()
            .zip(it.s.iter())
            .map(|(wi, si)| wi * si.ln())
            .sum();
    Ok(it.t * c.dot(&it.x) - barrier)
}

/// Newton step h and centrality δ_t = ‖h‖ in the Hessian norm, sharing
/// one factorization: h = (AᵀS⁻¹WS⁻¹A)⁻¹(t·c − AᵀS⁻¹w) and
/// δ_t² = hᵀ(t·c − AᵀS⁻¹w).
fn step_data(
    a: &ConstraintMatrix,
    it: &WeightedIterate,
    c: &DVector<f64>,
) -> Result<(DVector<f64>, f64), PathError> {
    let m = a.rows();
    let d = DiagonalVector::new(DVector::from_fn(m, |i, _| {
        it.w.values()[i] / (it.s[i] * it.s[i])
    }))
    .map_err(PathError::Linalg)?;
    let f = NormalEqFactorization::new(a, &d)?;
    let w_over_s = DVector::from_fn(m, |i, _| it.w.values()[i] / it.s[i]);
    let rhs = c * it.t - a.transpose_mul(&w_over_s);
    let h = f.solve(&rhs, SolveTolerance::default());
    let delta_sq = h.dot(&rhs);
    Ok((h, delta_sq.max(0.0).sqrt()))
}

/// The Newton step h_t(x,w).
pub fn newton_step(
    a: &ConstraintMatrix,
    it: &WeightedIterate,
    c: &DVector<f64>,
) -> Result<DVector<f64>, PathError> {
    step_data(a, it, c).map(|(h, _)| h)
}

/// The centrality δ_t(x,w).
pub fn centrality(
    a: &ConstraintMatrix,
    it: &WeightedIterate,
    c: &DVector<f64>,
) -> Result<f64, PathError> {
    step_data(a, it, c).map(|(_, d)| d)
}

fn r_step_from(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &WeightedIterate,
    h: &DVector<f64>,
    delta: f64,
    r: f64,
    gamma_bound: f64,
) -> Result<WeightedIterate, PathError> {
    if delta * gamma_bound > 0.125 {
        return Err(PathError::StepTooLarge(delta * gamma_bound));
    }
    let x_new = &it.x - h / (1.0 + r);
    let ah = a.mul(h);
    let ratio = r / (1.0 + r);
    let w_new = DVector::from_fn(it.w.len(), |i, _| {
        it.w.values()[i] * (1.0 + ratio * ah[i] / it.s[i])
    });
    let s_new = a.mul(&x_new) - b;
    check_interior(&s_new)?;
    let w = WeightVector::new(w_new).map_err(PathError::Weight)?;
    Ok(WeightedIterate {
        x: x_new,
        w,
        t: it.t,
        s: s_new,
    })
}

/// One r-step: x moves by −h/(1+r), weights move multiplicatively by
/// r/(1+r) times the relative slack change. Requires δ_t·γ ≤ 1/8 (with
/// the configured γ bound) so the new slacks stay strictly positive.
pub fn r_step(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &WeightedIterate,
    c: &DVector<f64>,
    r: f64,
    gamma_bound: f64,
) -> Result<WeightedIterate, PathError> {
    let (h, delta) = step_data(a, it, c)?;
    r_step_from(a, b, it, &h, delta, r, gamma_bound)
}

/// Centering with exact weights: recompute w = g(s), take the damped
/// Newton step x ← x − h/(1+c_r), recompute w = g(s_new). Contracts δ_t
/// by at least 1 − 1/(4·c_r) when δ_t ≤ 1/(80·c_γ·c_r).
pub fn centering_exact(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
) -> Result<WeightedIterate, PathError> {
    let s_diag = it.slack_diagonal();
    let w_g = exact_weight(a, &s_diag, &it.w, wcfg, 1e-11)?;
    let centered = WeightedIterate {
        x: it.x.clone(),
        w: w_g,
        t: it.t,
        s: it.s.clone(),
    };
    let (h, _) = step_data(a, &centered, c)?;
    let x_new = &centered.x - h / (1.0 + wcfg.c_r);
    let s_new = a.mul(&x_new) - b;
    check_interior(&s_new)?;
    let s_new_diag = DiagonalVector::new(s_new.clone()).map_err(PathError::Linalg)?;
    let w_new = exact_weight(a, &s_new_diag, &centered.w, wcfg, 1e-11)?;
    Ok(WeightedIterate {
        x: x_new,
        w: w_new,
        t: it.t,
        s: s_new,
    })
}

/// Centering with inexact weights: an r-step with r = c_r, a sketched
/// weight estimate z ≈ g(s_new), and a chasing-zero move applied in
/// log-weight space to keep w tracking g.
pub fn centering_inexact<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
    rng: &mut R,
) -> Result<WeightedIterate, PathError> {
    let (h, delta) = step_data(a, it, c)?;
    if delta < 1e-300 {
        return Ok(it.clone());
    }
    let stepped = r_step_from(a, b, it, &h, delta, wcfg.c_r, ccfg.gamma_bound)?;
    let s_diag = stepped.slack_diagonal();
    let z = compute_weight(a, &s_diag, &stepped.w, ccfg.r_obs, wcfg, rng)?;
    let psi = DVector::from_fn(z.len(), |i, _| (z.values()[i] / stepped.w.values()[i]).ln());
    let move_set = MoveSet {
        weight_norm_bound: ((wcfg.c_r + 0.14) / (wcfg.c_r + 1.0)) * delta,
        inf_norm_bound: 4.0 * wcfg.c_gamma * delta,
        w: stepped.w.clone(),
    };
    let mv = chasing_zero_move(&psi, &move_set, &ccfg.potential_config())?;
    // The game state is Ψ = log g − log w and the player's move is added
    // to it, so the weight update is Δlog w = −move.
    let w_final = DVector::from_fn(z.len(), |i, _| stepped.w.values()[i] * (-mv[i]).exp());
    let w = WeightVector::new(w_final).map_err(PathError::Weight)?;
    Ok(WeightedIterate {
        x: stepped.x,
        w,
        t: stepped.t,
        s: stepped.s,
    })
}

/// Exact audit of the current iterate.
pub fn centrality_report(
    a: &ConstraintMatrix,
    it: &WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
) -> Result<CentralityReport, PathError> {
    let s_diag = it.slack_diagonal();
    let (g, achieved) = exact_weight_detailed(a, &s_diag, &it.w, wcfg, 1e-8)?;
    let psi = DVector::from_fn(g.len(), |i, _| (g.values()[i] / it.w.values()[i]).ln());
    let w_tracking_error = psi.amax();
    let gamma = slack_sensitivity(a, &s_diag, &it.w.as_diagonal())?;
    let delta_t = centrality(a, it, c)?;
    let phi = potential(&psi, ccfg.mu).unwrap_or(f64::INFINITY);
    let mut noise_floor = tracking_noise_margin(achieved, wcfg);
    if w_tracking_error > ccfg.k_budget {
        // Only pay for the reproducibility probe when the cheap check
        // would fail anyway.
        noise_floor =
            noise_floor.max(weight_reproducibility_floor(a, &s_diag, &g, wcfg, 1e-8));
    }
    Ok(CentralityReport {
        delta_t,
        gamma,
        phi,
        w_tracking_error,
        noise_floor,
    })
}

/// Reproducibility floor of the weight measurement at slacks s: the log
/// space distance between the fixed point reached from the iterate's
/// warm start and the one reached from a cold start. On badly
/// conditioned slacks the leverage scores behind the weight function
/// carry rounding noise that the fixed-point iteration amplifies, and
/// the tracking error cannot be measured below this disagreement.
fn weight_reproducibility_floor(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    g_warm: &WeightVector,
    wcfg: &WeightConfig,
    accuracy: f64,
) -> f64 {
    match crate::weights::robust_exact_weight(a, s, wcfg, accuracy) {
        Ok(g_cold) => {
            let gap = g_warm
                .values()
                .iter()
                .zip(g_cold.values().iter())
                .map(|(x, y)| (x / y).ln().abs())
                .fold(0.0_f64, f64::max);
            2.0 * gap
        }
        Err(_) => 0.0,
    }
}

/// How far the measured tracking error can sit from the truth when the
/// weight computation bottoms out at a rounding-noise floor: the
/// per-step bounce `achieved` translates into a distance of roughly
/// step/(1 − rate) from the fixed point, and the proximal rate
/// approaches 1 as α does.
fn tracking_noise_margin(achieved: f64, wcfg: &WeightConfig) -> f64 {
    achieved * 16.0 / (1.0 - wcfg.alpha)
}

/// Counters accumulated across a path-following run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathStats {
    pub iterations: u64,
    pub centerings: u64,
    pub audits: u64,
    pub rollbacks: u64,
}

/// Knobs of the path-following loop.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOptions {
    /// Multiplicative t-growth per iteration is 1 + theta/√n.
    pub theta: f64,
    /// Audit cadence; `None` uses ⌈m/(100·c_r·ln(c_r·m))⌉, floored at 1.
    pub audit_period: Option<usize>,
    pub max_iters: u64,
    /// Cap on centering steps within one path iteration.
    pub inner_cap: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            theta: 0.05,
            audit_period: None,
            max_iters: 500_000,
            inner_cap: 60,
        }
    }
}

/// Serialized per-iteration trace record (JSONL when written to a file).
fn write_trace(
    trace: &mut Option<&mut (dyn Write + '_)>,
    iter: u64,
    t: f64,
    delta: f64,
    phi: Option<f64>,
    started: Instant,
) {
    if let Some(out) = trace.as_deref_mut() {
        let phi_txt = match phi {
            Some(p) if p.is_finite() => format!("{p}"),
            _ => "null".to_string(),
        };
        let _ = writeln!(
            out,
            "{{\"iter\":{iter},\"t\":{t},\"delta\":{delta},\"phi\":{phi_txt},\"wall_time\":{}}}",
            started.elapsed().as_secs_f64() * 1e3
        );
    }
}

/// Follow the path from the iterate's current t to `t_end` (either
/// direction). Each iteration multiplies t by the growth factor, takes
/// one inexact-centering step, and polishes centrality back below the
/// target with pure Newton steps on x (weights fixed). Every
/// audit-period iterations the exact invariants (weight tracking ≤ K,
/// δ ≤ target, γ within bound) are re-verified; on violation the loop
/// rolls back to the last audited snapshot, shrinks the t-growth rate,
/// and retries. Repeated consecutive rollbacks with no accepted step abort.
#[allow(clippy::too_many_arguments)]
pub fn path_following<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    start: WeightedIterate,
    c: &DVector<f64>,
    t_end: f64,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
    opts: &PathOptions,
    stats: &mut PathStats,
    rng: &mut R,
    mut trace: Option<&mut (dyn Write + '_)>,
) -> Result<WeightedIterate, PathError> {
    let started = Instant::now();
    let n = a.cols() as f64;
    let m = a.rows() as f64;
    let mut theta = if ccfg.strict {
        1.0 / (1e10 * wcfg.c_r.powi(3) * (wcfg.c_r * m).ln())
    } else {
        opts.theta
    };
    let audit_period = opts
        .audit_period
        .unwrap_or_else(|| ((m / (100.0 * wcfg.c_r * (wcfg.c_r * m).ln())).ceil() as usize).max(1));
    let decreasing = t_end < start.t;

    let mut it = start;
    let mut prefer_joint = false;
    center_to_target(a, b, &mut it, c, wcfg, ccfg, opts.inner_cap, stats, rng, &mut prefer_joint)?;
    let mut snapshot = it.clone();
    let mut consecutive_rollbacks = 0u32;
    let mut jumps = 0u32;

    loop {
        let arrived = if decreasing {
            it.t <= t_end * (1.0 + 1e-12)
        } else {
            it.t >= t_end * (1.0 - 1e-12)
        };
        if arrived {
            it.t = t_end;
            center_to_target(a, b, &mut it, c, wcfg, ccfg, opts.inner_cap, stats, rng, &mut prefer_joint)?;
            let report = centrality_report(a, &it, c, wcfg, ccfg)?;
            stats.audits += 1;
            if !audit_passes(&report, ccfg) {
                return Err(PathError::CenteringStalled(report.delta_t));
            }
            write_trace(
                &mut trace,
                stats.iterations,
                it.t,
                report.delta_t,
                Some(report.phi),
                started,
            );
            return Ok(it);
        }
        if stats.iterations >= opts.max_iters {
            return Err(PathError::IterationLimit);
        }

        let factor = 1.0 + theta / n.sqrt();
        let t_next = if decreasing {
            (it.t / factor).max(t_end)
        } else {
            (it.t * factor).min(t_end)
        };
        it.t = t_next;
        let step_result =
            center_to_target(a, b, &mut it, c, wcfg, ccfg, opts.inner_cap, stats, rng, &mut prefer_joint);
        stats.iterations += 1;

        let mut failed = step_result.is_err();
        let mut delta_now = f64::NAN;
        let mut phi_now = None;
        if !failed && stats.iterations % audit_period as u64 == 0 {
            stats.audits += 1;
            // An audit that cannot even be evaluated (factorization or
            // weight computation breakdown at an extreme iterate) is
            // treated like a failed audit: roll back and retry smaller.
            match centrality_report(a, &it, c, wcfg, ccfg) {
                Ok(report) => {
                    delta_now = report.delta_t;
                    phi_now = Some(report.phi);
                    if audit_passes(&report, ccfg) {
                        snapshot = it.clone();
                        consecutive_rollbacks = 0;
                        // Ease the step size back up once the path is
                        // smooth again.
                        if !ccfg.strict {
                            theta = (theta * 1.1).min(opts.theta);
                        }
                    } else {
                        failed = true;
                    }
                }
                Err(_) => failed = true,
            }
        }
        if failed {
            if std::env::var_os("WCP_DEBUG_AUDIT").is_some() {
                eprintln!(
                    "step failed at t={:.6e}: {:?}",
                    it.t,
                    step_result.as_ref().err()
                );
            }
            if let Err(e @ PathError::IterationLimit) = step_result {
                return Err(e);
            }
            stats.rollbacks += 1;
            consecutive_rollbacks += 1;
            // theta collapsing to where t no longer moves means further
            // retries would spin forever; both exhaustion modes get one
            // last rescue before giving up.
            let exhausted = consecutive_rollbacks >= 8 || theta * 0.5 < opts.theta * 1e-9;
            if exhausted {
                // Small steps cannot cross a parameter band where the
                // path kinks (the coupled point/weight system turns
                // nearly singular there). Jump t well past the band and
                // let the damped joint solve land on the far side;
                // continuity is not needed, only an audited point at the
                // new t.
                if !ccfg.strict && jumps < 4 {
                    jumps += 1;
                    let span = (1.0 + opts.theta / n.sqrt()).powi(32 * (1 << jumps));
                    let mut cand = snapshot.clone();
                    cand.t = if decreasing {
                        (snapshot.t / span).max(t_end)
                    } else {
                        (snapshot.t * span).min(t_end)
                    };
                    let landed = weighted_path_point(a, b, &mut cand, c, wcfg, ccfg).is_ok()
                        && centrality_report(a, &cand, c, wcfg, ccfg)
                            .map_or(false, |r| audit_passes(&r, ccfg));
                    if landed {
                        it = cand;
                        snapshot = it.clone();
                        consecutive_rollbacks = 0;
                        theta = opts.theta;
                        continue;
                    }
                }
                return Err(PathError::RollbackLoop(snapshot.t));
            }
            it = snapshot.clone();
            // Retry more cautiously; randomness is already fresh because
            // the generator has advanced.
            theta *= 0.5;
            continue;
        }
        write_trace(
            &mut trace,
            stats.iterations,
            it.t,
            delta_now,
            phi_now,
            started,
        );
    }
}

fn audit_passes(report: &CentralityReport, ccfg: &CenteringConfig) -> bool {
    if std::env::var_os("WCP_DEBUG_AUDIT").is_some() {
        eprintln!(
            "audit: track={:.3e}/{:.3e} delta={:.3e}/{:.3e} gamma={:.3}/{:.3} phi={:.3e}/{:.3e}",
            report.w_tracking_error,
            ccfg.k_budget,
            report.delta_t,
            ccfg.delta_target,
            report.gamma,
            ccfg.gamma_bound,
            report.phi,
            ccfg.phi_budget
        );
    }
    // When the tracking error sits below the measurement's own
    // reproducibility floor the potential is computed from noise too, so
    // its check is waived along with the widened tracking check.
    let within_noise = report.w_tracking_error <= report.noise_floor;
    report.w_tracking_error <= (ccfg.k_budget + report.noise_floor) * (1.0 + 1e-9)
        && report.delta_t <= ccfg.delta_target * (1.0 + 1e-6)
        && report.gamma <= ccfg.gamma_bound * (1.0 + 1e-6)
        && (report.phi <= ccfg.phi_budget * (1.0 + 1e-6) || within_noise)
}

/// Land the iterate directly on the path at its current t with the joint
/// solve and verify the landing with a full audit. Used to hop over
/// parameter bands where continuation breaks down.
pub(crate) fn land_on_path(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &mut WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
) -> bool {
    // Walk x to the weighted center of the frozen weights first. A t
    // jump leaves a huge centrality residual while the weights are
    // still consistent with the unchanged slacks, and the joint solve
    // is only locally convergent; the damped x-polish is globally so.
    for _ in 0..500 {
        let Ok((h, d)) = step_data(a, it, c) else {
            return false;
        };
        if d <= 0.5 * ccfg.delta_target {
            break;
        }
        let mut scale: f64 = if d * ccfg.gamma_bound > 0.125 {
            0.1 / (d * ccfg.gamma_bound)
        } else {
            1.0
        };
        loop {
            let x_new = &it.x - &h * scale;
            let s_new = a.mul(&x_new) - b;
            if s_new.iter().all(|v| v.is_finite() && *v > 0.0) {
                it.x = x_new;
                it.s = s_new;
                break;
            }
            scale *= 0.5;
            if scale < 1e-12 {
                return false;
            }
        }
    }
    weighted_path_point(a, b, it, c, wcfg, ccfg).is_ok()
        && centrality_report(a, it, c, wcfg, ccfg).map_or(false, |r| audit_passes(&r, ccfg))
}

/// Joint damped Newton solve for a self-consistent weighted path point
/// at the iterate's current t: residual [t·c − AᵀS⁻¹w; w − g(s)] over
/// (x, w). Near sharp turns of the path the alternation "re-center x,
/// then move w toward g(s)" is locally repulsive and no per-phase
/// damping converges; the joint system stays well posed there and this
/// solve lands on the path directly. Dense (n+m) work, recovery only.
fn weighted_path_point(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &mut WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
) -> Result<(), PathError> {
    let m = a.rows();
    let n = c.len();
    let mut cand = it.clone();
    let accuracy = (1e-3 * ccfg.k_budget).max(1e-10);
    // Extra damping engaged when the residual stalls: an oscillating
    // Newton map (eigenvalue near -1) converges once halved.
    let mut damp = 1.0_f64;
    let mut best_psi = f64::INFINITY;
    let mut best_delta = f64::INFINITY;
    let mut since_best = 0usize;
    for _ in 0..60 {
        let s_diag = cand.slack_diagonal();
        let (g, achieved) = match exact_weight_detailed(a, &s_diag, &cand.w, wcfg, accuracy) {
            Ok(pair) => pair,
            Err(_) => crate::weights::robust_exact_weight(a, &s_diag, wcfg, accuracy)
                .map(|g| (g, accuracy))
                .map_err(PathError::Weight)?,
        };
        let margin = tracking_noise_margin(achieved, wcfg);
        let psi = cand
            .w
            .values()
            .iter()
            .zip(g.values().iter())
            .map(|(wi, gi)| (gi / wi).ln().abs())
            .fold(0.0_f64, f64::max);
        let delta = centrality(a, &cand, c)?;
        if std::env::var_os("WCP_DEBUG_REFRESH").is_some() {
            let wmin = cand.w.values().min();
            let gmin = g.values().min();
            eprintln!(
                "joint t={:.3e} delta={:.3e} psi={:.3e} wmin={:.3e} gmin={:.3e}",
                cand.t, delta, psi, wmin, gmin
            );
        }
        if delta <= 0.5 * ccfg.delta_target {
            let mut bar = (0.1 * ccfg.k_budget).max(margin);
            if psi > bar && psi >= 0.9 * best_psi {
                // Only pay for the reproducibility probe once psi has
                // stopped falling; while the solve still converges the
                // next iteration settles the question for free.
                bar = bar.max(weight_reproducibility_floor(a, &s_diag, &g, wcfg, accuracy));
            }
            if psi <= bar {
                *it = cand;
                return Ok(());
            }
            // The point is centered but w cannot close the last gap to
            // g(s) (ill conditioning makes g hypersensitive to the x
            // moves). Adopting g outright zeroes the tracking error; keep
            // it if the centrality survives the weight change.
            let adopted = WeightedIterate {
                x: cand.x.clone(),
                w: g.clone(),
                t: cand.t,
                s: cand.s.clone(),
            };
            if centrality(a, &adopted, c)? <= ccfg.delta_target {
                *it = adopted;
                return Ok(());
            }
        }
        // Damp only when neither residual is moving; progress on either
        // one means the current step length is productive and may grow
        // back. The improvement bar scales with the step length, since a
        // damped linear solve can only contract by about that fraction.
        let bar = 1.0 - 0.25 * damp;
        let improving = psi < bar * best_psi || delta < bar * best_delta;
        best_psi = best_psi.min(psi);
        best_delta = best_delta.min(delta);
        if improving {
            since_best = 0;
            damp = (damp * 1.5).min(1.0);
        } else {
            since_best += 1;
            if since_best >= 3 {
                damp = (damp * 0.5).max(1.0 / 64.0);
                since_best = 0;
            }
        }
        let jg = weight_jacobian_at(a, &s_diag, &g, wcfg).map_err(PathError::Weight)?;
        let w_over_s = DVector::from_fn(m, |i, _| cand.w.values()[i] / cand.s[i]);
        let r1 = c * cand.t - a.transpose_mul(&w_over_s);
        let r2 = DVector::from_fn(m, |i, _| cand.w.values()[i] - g.values()[i]);
        let am = a.as_matrix();
        let mut jac = DMatrix::zeros(n + m, n + m);
        // ∂r1/∂x = AᵀS⁻²WA, ∂r1/∂w = −AᵀS⁻¹.
        let scaled = DMatrix::from_fn(m, n, |i, j| {
            am[(i, j)] * cand.w.values()[i] / (cand.s[i] * cand.s[i])
        });
        jac.view_mut((0, 0), (n, n)).copy_from(&(am.transpose() * &scaled));
        for j in 0..m {
            for i in 0..n {
                jac[(i, n + j)] = -am[(j, i)] / cand.s[j];
            }
        }
        // ∂r2/∂x = −G'(s)·A, ∂r2/∂w = I.
        let jga = -&jg * am;
        jac.view_mut((n, 0), (m, n)).copy_from(&jga);
        for i in 0..m {
            jac[(n + i, n + i)] = 1.0;
        }
        let rhs = DVector::from_fn(n + m, |i, _| if i < n { r1[i] } else { r2[i - n] });
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or(PathError::CenteringStalled(delta))?;
        let dx = DVector::from_fn(n, |i, _| step[i]);
        let dw = DVector::from_fn(m, |i, _| step[n + i]);
        // Fraction-to-boundary damping: stay strictly interior and keep
        // the weights positive.
        let a_dx = a.mul(&dx);
        let mut scale: f64 = damp;
        for i in 0..m {
            if a_dx[i] > 0.0 {
                scale = scale.min(0.9 * cand.s[i] / a_dx[i]);
            }
            if dw[i] > 0.0 {
                scale = scale.min(0.9 * cand.w.values()[i] / dw[i]);
            }
        }
        if std::env::var_os("WCP_DEBUG_REFRESH").is_some() {
            eprintln!("  joint scale={:.3e} |dx|={:.3e} |dw|={:.3e}", scale, dx.amax(), dw.amax());
        }
        let x_new = &cand.x - &dx * scale;
        let w_new = DVector::from_fn(m, |i, _| cand.w.values()[i] - scale * dw[i]);
        let s_new = a.mul(&x_new) - b;
        check_interior(&s_new)?;
        cand = WeightedIterate {
            x: x_new,
            w: WeightVector::new(w_new).map_err(PathError::Weight)?,
            t: cand.t,
            s: s_new,
        };
    }
    Err(PathError::CenteringStalled(centrality(a, &cand, c)?))
}

/// Bring δ_t at the iterate's current t below the target.
///
/// Strict mode repeats the inexact centering step, whose guaranteed
/// contraction is 1 − 1/(2(1+c_r)). Practical mode takes one
/// weight-coupled inexact centering step and then alternates two cheap
/// phases: pure Newton steps on x (quadratic contraction of δ, weights
/// fixed) and a weight refresh from the sketched weight estimate, until
/// the observed tracking residual has enough margin under the audit
/// budget. The refresh compensates the weight-function drift the Newton
/// phase causes by moving the slacks.
#[allow(clippy::too_many_arguments)]
fn center_to_target<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &mut WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
    cap: usize,
    stats: &mut PathStats,
    rng: &mut R,
    prefer_joint: &mut bool,
) -> Result<(), PathError> {
    let mut delta = centrality(a, it, c)?;
    if ccfg.strict && delta <= ccfg.delta_target {
        return Ok(());
    }
    if ccfg.strict {
        let mut calls = 0;
        while delta > ccfg.delta_target {
            if calls >= cap {
                return Err(PathError::CenteringStalled(delta));
            }
            *it = centering_inexact(a, b, it, c, wcfg, ccfg, rng)?;
            stats.centerings += 1;
            calls += 1;
            delta = centrality(a, it, c)?;
        }
        return Ok(());
    }
    let entry = it.clone();
    // In bands of the path where the alternation diverges every step,
    // skip straight to the joint solve until the alternation works again.
    if *prefer_joint {
        if weighted_path_point(a, b, it, c, wcfg, ccfg).is_ok() {
            return Ok(());
        }
        *it = entry.clone();
    }
    if practical_alternation(a, b, it, c, wcfg, ccfg, cap, stats, rng).is_ok() {
        *prefer_joint = false;
        return Ok(());
    }
    // Any alternation failure (divergent refresh, out-of-region game
    // step) is recovered by landing on the path directly with the joint
    // solve, restarting from the entry iterate since the failed rounds
    // may have wandered.
    *it = entry;
    let recovered = weighted_path_point(a, b, it, c, wcfg, ccfg);
    if recovered.is_ok() {
        *prefer_joint = true;
    }
    recovered
}

/// The cheap practical centering scheme: alternate pure Newton polish on
/// x with damped weight refreshes toward a warm-started exact weight
/// computation; if that cannot settle, one weight-coupled game step
/// breaks the deadlock and the loop retries.
#[allow(clippy::too_many_arguments)]
fn practical_alternation<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    b: &DVector<f64>,
    it: &mut WeightedIterate,
    c: &DVector<f64>,
    wcfg: &WeightConfig,
    ccfg: &CenteringConfig,
    cap: usize,
    stats: &mut PathStats,
    rng: &mut R,
) -> Result<(), PathError> {
    let mut delta = f64::NAN;
    let mut prev_psi = f64::INFINITY;
    let mut growing = 0usize;
    let mut best: Option<(f64, f64, WeightedIterate)> = None;
    let refresh_accuracy = 0.02 * ccfg.k_budget;
    // Polish well past the target so the weight refresh sees slacks of a
    // genuinely centered point; at the loose target the refresh target
    // keeps moving with the residual miscentering.
    let polish_target = 0.05 * ccfg.delta_target;
    for attempt in 0..2 {
        if attempt > 0 {
            *it = centering_inexact(a, b, it, c, wcfg, ccfg, rng)?;
            stats.centerings += 1;
            prev_psi = f64::INFINITY;
            growing = 0;
        }
        for _round in 0..20 {
            let mut polish = 0;
            loop {
                delta = centrality(a, it, c)?;
                if delta <= polish_target {
                    break;
                }
                if polish >= cap {
                    return Err(PathError::CenteringStalled(delta));
                }
                let (h, d) = step_data(a, it, c)?;
                if d * ccfg.gamma_bound > 0.125 {
                    // Out of the full-step region; fall back to a damped
                    // step sized to stay within it, shortening further if
                    // it would leave the interior.
                    let mut scale = 0.1 / (d * ccfg.gamma_bound);
                    loop {
                        let x_new = &it.x - &h * scale;
                        let s_new = a.mul(&x_new) - b;
                        if s_new.iter().all(|v| v.is_finite() && *v > 0.0) {
                            it.x = x_new;
                            it.s = s_new;
                            break;
                        }
                        scale *= 0.5;
                        if scale < 1e-12 {
                            return Err(PathError::CenteringStalled(d));
                        }
                    }
                    stats.centerings += 1;
                    polish += 1;
                    continue;
                }
                *it = r_step_from(a, b, it, &h, d, 0.0, ccfg.gamma_bound)?;
                stats.centerings += 1;
                polish += 1;
                let next = centrality(a, it, c)?;
                if !(next < delta) && next > polish_target {
                    return Err(PathError::CenteringStalled(next));
                }
            }
            let s_diag = it.slack_diagonal();
            // Warm started from a tracking-bounded w this converges in a few
            // Newton steps, far cheaper than a sketched recomputation.
            let (z, achieved) = exact_weight_detailed(a, &s_diag, &it.w, wcfg, refresh_accuracy)?;
            let mut margin = tracking_noise_margin(achieved, wcfg);
            let psi_inf =
                it.w.values()
                    .iter()
                    .zip(z.values().iter())
                    .map(|(wi, zi)| (zi / wi).ln().abs())
                    .fold(0.0_f64, f64::max);
            if psi_inf > (0.25 * ccfg.k_budget).max(margin) && psi_inf >= 0.9 * prev_psi {
                // Probe the measurement's reproducibility only once the
                // refresh has stopped making progress; the probe costs a
                // cold-started weight computation.
                margin = margin.max(weight_reproducibility_floor(
                    a,
                    &s_diag,
                    &z,
                    wcfg,
                    refresh_accuracy,
                ));
            }
            if psi_inf <= (0.25 * ccfg.k_budget).max(margin)
                || (psi_inf >= 0.9 * prev_psi
                    && psi_inf <= (0.7 * ccfg.k_budget).max(margin))
            {
                // Either comfortably inside the budget, or converged to the
                // refresh loop's fixed point with margin to spare.
                return Ok(());
            }
            if std::env::var_os("WCP_DEBUG_REFRESH").is_some() {
                eprintln!(
                    "refresh t={:.3e} attempt={} round={} psi={:.4e} K={:.4e}",
                    it.t, attempt, _round, psi_inf, ccfg.k_budget
                );
            }
            if best.as_ref().map_or(true, |(p, _, _)| psi_inf < *p) {
                best = Some((psi_inf, margin, it.clone()));
            }
            // The alternation diverges monotonically where its fixed
            // point is repulsive; two consecutive growths are a reliable
            // signal, and bailing early saves the remaining rounds.
            if psi_inf > prev_psi {
                growing += 1;
                if growing >= 2 {
                    break;
                }
            } else {
                growing = 0;
            }
            prev_psi = psi_inf;
            // Half-step toward the estimate in log space: a full reset
            // overshoots (the refresh and re-polish alternation oscillates),
            // a damped move contracts.
            let damped = DVector::from_fn(it.w.len(), |i, _| {
                let wi = it.w.values()[i];
                wi * (0.5 * (z.values()[i] / wi).ln()).exp()
            });
            it.w = WeightVector::new(damped).map_err(PathError::Weight)?;
        }
    }
    // Last resort: the best iterate the alternation saw, provided its
    // tracking residual leaves margin under the audit budget.
    if let Some((psi, margin, snapshot)) = best {
        if psi <= (0.9 * ccfg.k_budget).max(margin) {
            *it = snapshot;
            return Ok(());
        }
    }
    Err(PathError::CenteringStalled(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, DMatrix};
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::weights::robust_exact_weight;

    fn cm(a: DMatrix<f64>) -> ConstraintMatrix {
        ConstraintMatrix::new(a).unwrap()
    }

    /// Random strictly feasible instance: x random, slacks prescribed.
    fn random_instance(
        m: usize,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> (ConstraintMatrix, DVector<f64>, DVector<f64>) {
        let a = cm(DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0_f64)));
        let x = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let s = DVector::from_fn(m, |_, _| rng.gen_range(0.5..2.0));
        let b = a.mul(&x) - &s;
        (a, b, x)
    }

    #[test]
    fn penalized_objective_basic_values() {
        let a = cm(DMatrix::identity(2, 2));
        let b = DVector::from_element(2, -1.0);
        let it = WeightedIterate::new(
            &a,
            &b,
            DVector::zeros(2),
            WeightVector::uniform(2, 1.0),
            1.0,
        )
        .unwrap();
        // c = 0, s = 1 -> 0.
        assert!((penalized_objective(&it, &DVector::zeros(2)).unwrap()).abs() < 1e-14);
        // t = 0, s = e -> -m.
        let b2 = DVector::from_element(2, -std::f64::consts::E);
        let it2 = WeightedIterate::new(
            &a,
            &b2,
            DVector::zeros(2),
            WeightVector::uniform(2, 1.0),
            0.0,
        )
        .unwrap();
        assert!(
            (penalized_objective(&it2, &DVector::from_element(2, 3.0)).unwrap() + 2.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn newton_step_zero_when_gradient_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b, x) = random_instance(6, 2, &mut rng);
        let w = WeightVector::new(DVector::from_fn(6, |_, _| rng.gen_range(0.4..1.5))).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        let w_over_s = DVector::from_fn(6, |i, _| it.w.values()[i] / it.s[i]);
        let c = a.transpose_mul(&w_over_s);
        let h = newton_step(&a, &it, &c).unwrap();
        assert!(h.amax() < 1e-10);
        assert!(centrality(&a, &it, &c).unwrap() < 1e-10);
    }

    #[test]
    fn newton_step_hand_computed() {
        // A = I, b = 0, x = (1,1), w = 1, c = (1,0), t = 1:
        // H = S^-2 = I, rhs = c - w/s = (0,-1), h = (0,-1).
        let a = cm(DMatrix::identity(2, 2));
        let b = DVector::zeros(2);
        let it = WeightedIterate::new(
            &a,
            &b,
            DVector::from_element(2, 1.0),
            WeightVector::uniform(2, 1.0),
            1.0,
        )
        .unwrap();
        let h = newton_step(&a, &it, &DVector::from_row_slice(&[1.0, 0.0])).unwrap();
        assert!(h[0].abs() < 1e-14 && (h[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn centrality_scaling_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, b, x) = random_instance(8, 3, &mut rng);
        let w_vals = DVector::from_fn(8, |_, _| rng.gen_range(0.4..1.5));
        let c = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let it = WeightedIterate::new(
            &a,
            &b,
            x.clone(),
            WeightVector::new(w_vals.clone()).unwrap(),
            1.0,
        )
        .unwrap();
        let d1 = centrality(&a, &it, &c).unwrap();
        let lambda = 3.7;
        let it2 = WeightedIterate::new(
            &a,
            &b,
            x,
            WeightVector::new(w_vals * lambda).unwrap(),
            lambda,
        )
        .unwrap();
        let d2 = centrality(&a, &it2, &c).unwrap();
        // Scaling (w, t) -> (λw, λt) multiplies the gradient by λ and
        // the Hessian by λ, so δ scales by √λ.
        assert!((d2 - lambda.sqrt() * d1).abs() < 1e-9 * (1.0 + d1));
    }

    #[test]
    fn centrality_growth_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (a, b, x) = random_instance(10, 3, &mut rng);
            let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
            let wcfg = WeightConfig::from_dims(10, 3);
            let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-10).unwrap();
            let c = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let it = WeightedIterate::new(&a, &b, x.clone(), w.clone(), 1.0).unwrap();
            let d1 = centrality(&a, &it, &c).unwrap();
            let lambda = rng.gen_range(0.001..0.1);
            let it2 = WeightedIterate::new(&a, &b, x, w.clone(), 1.0 + lambda).unwrap();
            let d2 = centrality(&a, &it2, &c).unwrap();
            let bound = (1.0 + lambda) * d1 + lambda * w.l1_norm().sqrt();
            assert!(d2 <= bound * (1.0 + 1e-9), "d2 = {d2}, bound = {bound}");
        }
    }

    #[test]
    fn r_step_zero_newton_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b, x) = random_instance(8, 3, &mut rng);
        let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
        let wcfg = WeightConfig::from_dims(8, 3);
        let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-10).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        // Gradient-zero cost: step leaves everything unchanged.
        let w_over_s = DVector::from_fn(8, |i, _| it.w.values()[i] / it.s[i]);
        let c0 = a.transpose_mul(&w_over_s);
        let unchanged = r_step(&a, &b, &it, &c0, 3.0, 2.5).unwrap();
        assert!((&unchanged.x - &it.x).amax() < 1e-9);
        assert!((unchanged.w.values() - it.w.values()).amax() < 1e-9);
        // r = 0: pure Newton step, weights unchanged.
        let c = &c0 + DVector::from_fn(3, |_, _| rng.gen_range(-0.01..0.01));
        let stepped = r_step(&a, &b, &it, &c, 0.0, 2.5).unwrap();
        assert_eq!(stepped.w.values(), it.w.values());
        let h = newton_step(&a, &it, &c).unwrap();
        assert!((&it.x - &h - &stepped.x).amax() < 1e-12);
    }

    #[test]
    fn r_step_slack_and_weight_norm_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (a, b, x) = random_instance(10, 3, &mut rng);
            let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
            let wcfg = WeightConfig::from_dims(10, 3);
            let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-10).unwrap();
            let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
            let w_over_s = DVector::from_fn(10, |i, _| it.w.values()[i] / it.s[i]);
            let c0 = a.transpose_mul(&w_over_s);
            let dir = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let gamma = slack_sensitivity(&a, &it.slack_diagonal(), &it.w.as_diagonal()).unwrap();
            // Scale the cost perturbation for a safe delta.
            let mut c = c0.clone() + dir.clone() * 1e-3;
            let mut delta = centrality(&a, &it, &c).unwrap();
            if delta * gamma > 0.12 {
                c = c0.clone() + dir * (1e-4 / delta);
                delta = centrality(&a, &it, &c).unwrap();
            }
            let r = 4.0;
            let stepped = r_step(&a, &b, &it, &c, r, gamma).unwrap();
            let rel_slack = DVector::from_fn(10, |i, _| (stepped.s[i] - it.s[i]) / it.s[i]);
            let wn = rel_slack
                .iter()
                .zip(it.w.values().iter())
                .map(|(d, wi)| wi * d * d)
                .sum::<f64>()
                .sqrt();
            assert!(wn <= delta / (1.0 + r) + 1e-10);
            assert!(rel_slack.amax() <= delta * gamma / (1.0 + r) + 1e-10);
            let rel_w = DVector::from_fn(10, |i, _| {
                (stepped.w.values()[i] - it.w.values()[i]) / it.w.values()[i]
            });
            assert!(rel_w.amax() <= r * delta * gamma / (1.0 + r) + 1e-10);
        }
    }

    #[test]
    fn centering_exact_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, b, x) = random_instance(10, 2, &mut rng);
        let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
        let mut wcfg = WeightConfig::from_dims(10, 2);
        wcfg.strict = true;
        let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        let w_over_s = DVector::from_fn(10, |i, _| it.w.values()[i] / it.s[i]);
        let c0 = a.transpose_mul(&w_over_s);
        let dir = DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
        let mut c = c0.clone() + dir.clone();
        let d0 = centrality(&a, &it, &c).unwrap();
        let target = 1.0 / (100.0 * wcfg.c_gamma * wcfg.c_r);
        c = c0 + dir * (target / d0);
        let delta = centrality(&a, &it, &c).unwrap();
        let after = centering_exact(&a, &b, &it, &c, &wcfg).unwrap();
        let delta_after = centrality(&a, &after, &c).unwrap();
        assert!(delta_after <= (1.0 - 1.0 / (4.0 * wcfg.c_r)) * delta + 1e-12);
        // Repeated application drives delta to solver tolerance.
        let mut cur = after;
        for _ in 0..200 {
            if centrality(&a, &cur, &c).unwrap() < 1e-12 {
                break;
            }
            cur = centering_exact(&a, &b, &cur, &c, &wcfg).unwrap();
        }
        assert!(centrality(&a, &cur, &c).unwrap() < 1e-12);
    }

    #[test]
    fn centering_inexact_contracts_and_tracks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, b, x) = random_instance(12, 3, &mut rng);
        let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
        let wcfg = WeightConfig::from_dims(12, 3);
        let ccfg = CenteringConfig::new(&wcfg, 12, false);
        let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        let w_over_s = DVector::from_fn(12, |i, _| it.w.values()[i] / it.s[i]);
        let c0 = a.transpose_mul(&w_over_s);
        let dir = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let d_raw = centrality(&a, &it, &(c0.clone() + dir.clone())).unwrap();
        let c = c0 + dir * (5e-3 / d_raw);
        let mut cur = it;
        let mut delta = centrality(&a, &cur, &c).unwrap();
        for call in 0..180 {
            cur = centering_inexact(&a, &b, &cur, &c, &wcfg, &ccfg, &mut rng).unwrap();
            let next = centrality(&a, &cur, &c).unwrap();
            assert!(
                next <= (1.0 - 0.5 / (1.0 + wcfg.c_r)) * delta + 1e-12,
                "call {call}: delta went {delta} -> {next}"
            );
            delta = next;
            if call % 20 == 19 {
                let report = centrality_report(&a, &cur, &c, &wcfg, &ccfg).unwrap();
                assert!(report.w_tracking_error <= wcfg.k_budget);
            }
            if delta < 1e-13 {
                break;
            }
        }
        assert!(delta < 1e-9);
    }

    #[test]
    fn path_following_trivial_endpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (a, b, x) = random_instance(10, 3, &mut rng);
        let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
        let wcfg = WeightConfig::from_dims(10, 3);
        let ccfg = CenteringConfig::new(&wcfg, 10, false);
        let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        let w_over_s = DVector::from_fn(10, |i, _| it.w.values()[i] / it.s[i]);
        let c = a.transpose_mul(&w_over_s);
        let mut stats = PathStats::default();
        let out = path_following(
            &a,
            &b,
            it.clone(),
            &c,
            1.0,
            &wcfg,
            &ccfg,
            &PathOptions::default(),
            &mut stats,
            &mut rng,
            None,
        )
        .unwrap();
        assert_eq!(out.t, 1.0);
        assert_eq!(stats.audits, 1);
        assert!((out.x - it.x).amax() < 1e-9);
    }

    #[test]
    fn path_following_thousandfold_growth() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, b, x) = random_instance(20, 3, &mut rng);
        let s_diag = DiagonalVector::new(a.mul(&x) - &b).unwrap();
        let wcfg = WeightConfig::from_dims(20, 3);
        let ccfg = CenteringConfig::new(&wcfg, 20, false);
        let w = robust_exact_weight(&a, &s_diag, &wcfg, 1e-11).unwrap();
        let it = WeightedIterate::new(&a, &b, x, w, 1.0).unwrap();
        let w_over_s = DVector::from_fn(20, |i, _| it.w.values()[i] / it.s[i]);
        let c = a.transpose_mul(&w_over_s) + DVector::from_fn(3, |_, _| rng.gen_range(-1e-4..1e-4));
        let mut stats = PathStats::default();
        let out = path_following(
            &a,
            &b,
            it,
            &c,
            1e3,
            &wcfg,
            &ccfg,
            &PathOptions::default(),
            &mut stats,
            &mut rng,
            None,
        )
        .unwrap();
        assert!((out.t - 1e3).abs() < 1e-9 * 1e3);
        let report = centrality_report(&a, &out, &c, &wcfg, &ccfg).unwrap();
        assert!(report.delta_t <= ccfg.delta_target * (1.0 + 1e-6));
        assert!(report.w_tracking_error <= wcfg.k_budget);
    }
}
