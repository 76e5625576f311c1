//! The regularized weight function g(s) and its computation.
//!
//! For a constraint matrix A and slack vector s, the weight function is
//! the minimizer over positive w of
//!
//! ```text
//! f̂(s,w) = 1ᵀw − (1/α)·log det(A_sᵀ W^α A_s) − β·Σᵢ log wᵢ,   A_s = S⁻¹A.
//! ```
//!
//! Its fixed-point characterization is g = σ(g^α) + β·1, where σ are the
//! leverage scores of A_s row-reweighted by g^α. The minimizer satisfies
//! β ≤ gᵢ ≤ 1+β, ‖g‖₁ = n + βm, and keeps the slack sensitivity of the
//! weighted barrier at most 2 — the properties the path-following loop
//! relies on.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    self, approx_leverage_scores, exact_leverage_scores, projection_matrix, sketch_size,
    ConstraintMatrix, DiagonalVector, LinalgError,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum WeightError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("fixed-point iteration did not converge within {iterations} iterations (last step {last_step:.3e})")]
    NoConvergence { iterations: usize, last_step: f64 },
    #[error("invalid weight configuration: {0}")]
    InvalidConfig(String),
}

/// Constants governing the weight function and centering, derived from
/// the instance shape (m constraints, n variables).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    /// Exponent of the reweighting in the log-det term, in (0,1).
    pub alpha: f64,
    /// Regularization strength; also the lower bound on every weight.
    pub beta: f64,
    /// Step-consistency constant; the damping ratio of r-steps.
    pub c_r: f64,
    /// Slack-sensitivity bound of the weight function.
    pub c_gamma: f64,
    /// Bound on the total weight ‖g‖₁ ≤ c_1.
    pub c_1: f64,
    /// Weight-tracking error budget of the path loop (ℓ∞, log scale).
    pub k_budget: f64,
    /// Conservative constant in the homotopy decay rate
    /// (1−α)^{3/2}/(homotopy_decay·c_r²·√n); the initializer starts more
    /// aggressively and falls back toward this on invariant violations.
    pub homotopy_decay: f64,
    /// Lower bound on the sketch accuracy used by `compute_weight` in
    /// practical mode (the worst-case formula is far below what desk
    /// instances need).
    pub eps_floor: f64,
    /// Cap on proximal steps per `compute_weight` call in practical mode.
    pub max_proximal_steps: usize,
    /// Use the worst-case constants verbatim (conformance testing).
    pub strict: bool,
}

impl WeightConfig {
    /// Defaults for an m×n instance: α = 1 − 1/log₂(2m/n), β = n/(2m),
    /// c_r = 2·log₂(2m/n), c_γ = 2, c_1 = 2n, K = 1/(24·c_r). The ratio
    /// 2m/n is floored at 4 so that α ≥ 1/2 even for nearly square
    /// systems.
    pub fn from_dims(m: usize, n: usize) -> Self {
        let ratio = (2.0 * m as f64 / n as f64).max(4.0);
        let log_ratio = ratio.log2();
        let c_r = 2.0 * log_ratio;
        Self {
            alpha: 1.0 - 1.0 / log_ratio,
            beta: n as f64 / (2.0 * m as f64),
            c_r,
            c_gamma: 2.0,
            c_1: 2.0 * n as f64,
            k_budget: 1.0 / (24.0 * c_r),
            homotopy_decay: 10.0,
            eps_floor: 0.1,
            max_proximal_steps: 240,
            strict: false,
        }
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(WeightError::InvalidConfig(format!(
                "alpha = {} not in (0,1)",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(WeightError::InvalidConfig(format!(
                "beta = {} not in (0,1)",
                self.beta
            )));
        }
        if self.beta.powf(1.0 - self.alpha) < 0.5 - 1e-12 {
            return Err(WeightError::InvalidConfig(format!(
                "beta^(1-alpha) = {} below 1/2",
                self.beta.powf(1.0 - self.alpha)
            )));
        }
        if self.c_r < 1.0 || self.c_gamma < 1.0 {
            return Err(WeightError::InvalidConfig(
                "c_r and c_gamma must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Same constants with a substituted regularizer (homotopy stages
    /// run with β̂ > β, intentionally outside the β < 1 assumption).
    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            beta,
            ..self.clone()
        }
    }
}

/// A strictly positive weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: DVector<f64>,
}

impl WeightVector {
    pub fn new(values: DVector<f64>) -> Result<Self, WeightError> {
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(WeightError::InvalidConfig(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn uniform(m: usize, value: f64) -> Self {
        Self {
            values: DVector::from_element(m, value),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn as_diagonal(&self) -> DiagonalVector {
        DiagonalVector::new(self.values.clone()).expect("weights are positive by construction")
    }
}

/// Leverage scores of S⁻¹A under row weights w^α.
fn reweighted_leverage<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &DVector<f64>,
    alpha: f64,
    sketch_eps: Option<f64>,
    rng: Option<&mut R>,
) -> Result<DVector<f64>, WeightError> {
    let inv_s = s.values().map(|v| 1.0 / v);
    let a_s = a.scale_rows(&inv_s);
    let x = DiagonalVector::new(w.map(|v| v.powf(alpha)))?;
    let sigma = match (sketch_eps, rng) {
        (Some(eps), Some(rng))
            if sketch_size(a.rows(), eps, linalg::JL_SKETCH_CONSTANT) < a.rows() =>
        {
            approx_leverage_scores(&a_s, &x, eps, rng)?
        }
        // When the sketch would need at least m probes, the exact path is
        // both cheaper and trivially within the (1±ε) contract.
        _ => exact_leverage_scores(&a_s, &x)?,
    };
    Ok(sigma)
}

/// The regularized objective f̂(s,w) whose minimizer is g(s).
pub fn weight_objective(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &WeightVector,
    cfg: &WeightConfig,
) -> Result<f64, WeightError> {
    let inv_s = s.values().map(|v| 1.0 / v);
    let a_s = a.scale_rows(&inv_s);
    let x = DiagonalVector::new(w.values().map(|v| v.powf(cfg.alpha)))?;
    let f = linalg::NormalEqFactorization::new(&a_s, &x)?;
    let log_det = f.log_det();
    let linear: f64 = w.values().iter().sum();
    let log_barrier: f64 = w.values().iter().map(|v| v.ln()).sum();
    Ok(linear - log_det / cfg.alpha - cfg.beta * log_barrier)
}

/// ∇_w f̂(s,w) = 1 − σ/w − β/w with σ the leverage scores of S⁻¹A under
/// weights w^α.
pub fn weight_gradient<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &WeightVector,
    cfg: &WeightConfig,
    exact: bool,
    rng: Option<&mut R>,
) -> Result<DVector<f64>, WeightError> {
    let eps = if exact {
        None
    } else {
        Some(cfg.eps_floor.max(0.01))
    };
    let sigma = reweighted_leverage(a, s, w.values(), cfg.alpha, eps, rng)?;
    Ok(DVector::from_fn(w.len(), |i, _| {
        1.0 - sigma[i] / w.values()[i] - cfg.beta / w.values()[i]
    }))
}

/// Exact weight computation: the box-clamped proximal fixed-point
/// iteration with exact leverage scores,
///
/// ```text
/// w ← clamp( ½(w + σ(w^α) + β·1),  w·(1−(1−α)/24), w·(1+(1−α)/24) ),
/// ```
///
/// run until successive iterates differ by less than `target_accuracy`
/// in relative ℓ∞. The clamp box is re-centered at the current iterate
/// each step, so convergence does not depend on the starting point lying
/// inside the final contraction basin. Once the iterate is close to the
/// fixed point the loop switches to damped Newton steps on the gradient
/// system (dense, desk scale), which reach tight accuracies in a handful
/// of iterations instead of the proximal iteration's slow linear rate.
pub fn exact_weight(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w0: &WeightVector,
    cfg: &WeightConfig,
    target_accuracy: f64,
) -> Result<WeightVector, WeightError> {
    exact_weight_detailed(a, s, w0, cfg, target_accuracy).map(|(w, _)| w)
}

/// Like `exact_weight`, but also reports the relative ℓ∞ size of the
/// last fixed-point step taken. When the slacks are too badly
/// conditioned for the leverage scores to support the requested
/// accuracy, the returned weights sit at the attainable noise floor and
/// the reported step is the caller's handle on how far that floor is
/// from the request (0 when the request was met).
pub fn exact_weight_detailed(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w0: &WeightVector,
    cfg: &WeightConfig,
    target_accuracy: f64,
) -> Result<(WeightVector, f64), WeightError> {
    let radius = (1.0 - cfg.alpha) / 24.0;
    let cap = 64 * ((12.0 / (1.0 - cfg.alpha)).ceil() as usize);
    let newton_threshold = (radius * 0.5).max(target_accuracy);
    let mut w = w0.values().clone();
    let mut last_step = f64::INFINITY;
    let mut newton_ready = false;
    let mut iterations = 0;
    let mut best_step = f64::INFINITY;
    let mut since_improvement = 0usize;
    while iterations < cap {
        if newton_ready {
            match newton_weight_polish(a, s, &mut w, cfg, target_accuracy, cap - iterations) {
                Ok(()) => return WeightVector::new(w).map(|w| (w, 0.0)),
                // Newton left the positive orthant or stalled; resume the
                // safe proximal iteration.
                Err(_) => newton_ready = false,
            }
        }
        let sigma = reweighted_leverage::<rand::rngs::ThreadRng>(a, s, &w, cfg.alpha, None, None)?;
        let mut step: f64 = 0.0;
        for i in 0..w.len() {
            let target = 0.5 * (w[i] + sigma[i] + cfg.beta);
            let lo = w[i] * (1.0 - radius);
            let hi = w[i] * (1.0 + radius);
            let next = target.clamp(lo, hi);
            step = step.max((next - w[i]).abs() / w[i]);
            w[i] = next;
        }
        iterations += 1;
        last_step = step;
        if step < target_accuracy {
            return WeightVector::new(w).map(|w| (w, 0.0));
        }
        if step < 0.7 * best_step {
            best_step = step;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        // On badly conditioned slacks the leverage scores carry rounding
        // noise that keeps the step from ever reaching a tight accuracy
        // request. Once the step has stopped shrinking for a long stretch
        // while already well inside the contraction region, the iterate
        // is at the attainable noise floor; return it rather than grind
        // to the cap and fail.
        if since_improvement > 15 && step < 0.1 * radius {
            return WeightVector::new(w).map(|w| (w, step));
        }
        if step < newton_threshold {
            newton_ready = true;
        }
    }
    Err(WeightError::NoConvergence {
        iterations: cap,
        last_step,
    })
}

/// Damped Newton iteration on ∇f̂(s,·) = 0 from a near-fixed-point w.
/// On success w holds the polished weights; on failure returns the last
/// relative step size so the caller can resume the proximal iteration.
fn newton_weight_polish(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &mut DVector<f64>,
    cfg: &WeightConfig,
    target_accuracy: f64,
    budget: usize,
) -> Result<(), f64> {
    let m = a.rows();
    let inv_s = s.values().map(|v| 1.0 / v);
    let a_s = a.scale_rows(&inv_s);
    let mut last_step = f64::INFINITY;
    for _ in 0..budget.min(40) {
        let x = DiagonalVector::new(w.map(|v| v.powf(cfg.alpha))).map_err(|_| last_step)?;
        let p = projection_matrix(&a_s, &x).map_err(|_| last_step)?;
        // Hessian W⁻¹(Σ + βI − αΛ)W⁻¹ with Λ = Σ − P∘P; gradient
        // 1 − σ/w − β/w.
        let mut h = DMatrix::zeros(m, m);
        let mut grad = DVector::zeros(m);
        for i in 0..m {
            let sigma_i = p[(i, i)];
            for j in 0..m {
                let lambda_ij = if i == j {
                    sigma_i - p[(i, j)] * p[(i, j)]
                } else {
                    -p[(i, j)] * p[(i, j)]
                };
                let mut v = -cfg.alpha * lambda_ij;
                if i == j {
                    v += sigma_i + cfg.beta;
                }
                h[(i, j)] = v / (w[i] * w[j]);
            }
            grad[i] = 1.0 - sigma_i / w[i] - cfg.beta / w[i];
        }
        let delta = h.lu().solve(&grad).ok_or(last_step)?;
        // Keep the step inside a trust region of half the current weight.
        let mut scale: f64 = 1.0;
        for i in 0..m {
            let rel = delta[i].abs() / w[i];
            if rel > 0.5 {
                scale = scale.min(0.5 / rel);
            }
        }
        let mut step: f64 = 0.0;
        for i in 0..m {
            let next = w[i] - scale * delta[i];
            step = step.max((next - w[i]).abs() / w[i]);
            w[i] = next;
        }
        if !step.is_finite() {
            return Err(f64::INFINITY);
        }
        if step < target_accuracy {
            return Ok(());
        }
        // Newton should contract rapidly near the fixed point; if it is
        // not, hand control back to the proximal iteration.
        if step > 0.95 * last_step && step > 1e3 * target_accuracy {
            return Err(step);
        }
        last_step = step;
    }
    Err(last_step)
}

/// Jacobian G'(s) = −2G(G − αΛ)⁻¹ΛS⁻¹ of the weight function, with
/// Λ = Σ − P∘P the projection Laplacian at weights g^α. Dense, desk
/// scale only (used by tests and invariant checks).
pub fn weight_jacobian(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    cfg: &WeightConfig,
) -> Result<DMatrix<f64>, WeightError> {
    let g = robust_exact_weight(a, s, cfg, 1e-11)?;
    weight_jacobian_at(a, s, &g, cfg)
}

/// Same Jacobian evaluated at a caller-supplied weight vector (assumed to
/// be g(s) to the caller's accuracy), skipping the fixed-point solve.
pub fn weight_jacobian_at(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    g: &WeightVector,
    cfg: &WeightConfig,
) -> Result<DMatrix<f64>, WeightError> {
    let m = a.rows();
    let inv_s = s.values().map(|v| 1.0 / v);
    let a_s = a.scale_rows(&inv_s);
    let x = DiagonalVector::new(g.values().map(|v| v.powf(cfg.alpha)))?;
    let p = projection_matrix(&a_s, &x)?;
    // Λ = Σ − P∘P.
    let mut lambda = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            lambda[(i, j)] = -p[(i, j)] * p[(i, j)];
        }
        lambda[(i, i)] += p[(i, i)];
    }
    // (G − αΛ) X = Λ, then J = −2 G X S⁻¹.
    let mut lhs = -cfg.alpha * &lambda;
    for i in 0..m {
        lhs[(i, i)] += g.values()[i];
    }
    let solved = lhs.lu().solve(&lambda).ok_or(LinalgError::RankDeficient {
        column: 0,
        pivot: 0.0,
        floor: 0.0,
    })?;
    let mut jac = solved;
    for i in 0..m {
        for k in 0..m {
            jac[(i, k)] *= -2.0 * g.values()[i] / s.values()[k];
        }
    }
    Ok(jac)
}

/// exact_weight from a starting point derived from the instance itself
/// (leverage scores at uniform weights), so callers need not supply an
/// in-basin w0.
pub fn robust_exact_weight(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    cfg: &WeightConfig,
    target_accuracy: f64,
) -> Result<WeightVector, WeightError> {
    let ones = DVector::from_element(a.rows(), 1.0);
    let sigma = reweighted_leverage::<rand::rngs::ThreadRng>(a, s, &ones, cfg.alpha, None, None)?;
    let w0 = WeightVector::new(sigma.map(|v| v.max(0.0) + cfg.beta))?;
    exact_weight(a, s, &w0, cfg, target_accuracy)
}

/// Sketched weight computation: k = ⌈12·c_r·ln(4m/K)⌉ proximal steps,
/// each using leverage scores accurate to ε = K/(48·c_r·ln(2m/K)), all
/// clamped to the box of relative radius 1/(12·c_r) around w0. Returns w
/// with ‖G⁻¹(g(s) − w)‖_∞ ≤ K (with high probability) provided w0 was
/// within 1/(12·c_r) of g(s).
///
/// In practical mode the sketch accuracy is floored at `cfg.eps_floor`,
/// the step count is capped at `cfg.max_proximal_steps`, and the loop
/// exits early once the relative step size drops below K/(8m); strict
/// mode uses the worst-case formulas verbatim.
pub fn compute_weight<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w0: &WeightVector,
    k_err: f64,
    cfg: &WeightConfig,
    rng: &mut R,
) -> Result<WeightVector, WeightError> {
    let m = a.rows() as f64;
    let mut steps = (12.0 * cfg.c_r * (4.0 * m / k_err).ln()).ceil() as usize;
    let mut eps = k_err / (48.0 * cfg.c_r * (2.0 * m / k_err).ln());
    if !cfg.strict {
        steps = steps.min(cfg.max_proximal_steps);
        eps = eps.max(cfg.eps_floor);
    }
    let radius = 1.0 / (12.0 * cfg.c_r);
    let lo: DVector<f64> = w0.values() * (1.0 - radius);
    let hi: DVector<f64> = w0.values() * (1.0 + radius);
    let mut w = w0.values().clone();
    for _ in 0..steps {
        let sigma = reweighted_leverage(a, s, &w, cfg.alpha, Some(eps), Some(rng))?;
        let mut step: f64 = 0.0;
        for i in 0..w.len() {
            let next = (0.5 * (w[i] + sigma[i] + cfg.beta)).clamp(lo[i], hi[i]);
            step = step.max((next - w[i]).abs() / w[i]);
            w[i] = next;
        }
        if !cfg.strict && step < k_err / (8.0 * m) {
            break;
        }
    }
    WeightVector::new(w)
}

/// Fraction of coordinates of w resting on the compute_weight clamp box
/// around w0 (a cheap proxy for "the homotopy step was too large").
fn boundary_stall(w: &DVector<f64>, w0: &DVector<f64>, radius: f64) -> bool {
    w.iter()
        .zip(w0.iter())
        .any(|(wi, w0i)| ((wi - w0i).abs() / w0i) >= radius * (1.0 - 1e-9))
}

/// Homotopy initializer: starts from the analytically known weights at a
/// large regularizer β̂ = 12·c_r (where g ≈ β̂·1) and tracks the weight
/// function while β̂ decays to its final value n/(2m), then refines to
/// accuracy `k_err`.
///
/// The decay rate is adaptive: it starts just inside the tracking box
/// (relative step 1/(13·c_r)), halves whenever the tracked weights stall
/// on the clamp boundary or an exact spot check (small m) finds the
/// tracking invariant violated, and never goes below the conservative
/// rate (1−α)^{3/2}/(homotopy_decay·c_r²·√n). Strict mode uses the
/// conservative rate only.
pub fn compute_initial_weight<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    k_err: f64,
    cfg: &WeightConfig,
    rng: &mut R,
) -> Result<WeightVector, WeightError> {
    cfg.validate()?;
    let n = a.cols() as f64;
    let beta_final = cfg.beta;
    let mut beta_hat = 12.0 * cfg.c_r;
    let mut w = WeightVector::uniform(a.rows(), beta_hat);
    let stage_err = 1.0 / (50.0 * cfg.c_r);
    let conservative =
        (1.0 - cfg.alpha).powf(1.5) / (cfg.homotopy_decay * cfg.c_r * cfg.c_r * n.sqrt());
    let mut rel_step = if cfg.strict {
        conservative
    } else {
        1.0 / (13.0 * cfg.c_r)
    };
    let radius = 1.0 / (12.0 * cfg.c_r);
    let spot_check = a.rows() <= 64;
    let mut accepted: usize = 0;
    while beta_hat > beta_final {
        let beta_next = (beta_hat * (1.0 - rel_step)).max(beta_final);
        let stage_cfg = cfg.with_beta(beta_next);
        let w_next = compute_weight(a, s, &w, stage_err, &stage_cfg, rng)?;
        let stalled = !cfg.strict && boundary_stall(w_next.values(), w.values(), radius);
        let mut violated = stalled;
        if !violated && spot_check && !cfg.strict && accepted % 50 == 0 {
            if let Ok(g) = exact_weight(a, s, &w_next, &stage_cfg, 1e-9) {
                let err = w_next
                    .values()
                    .iter()
                    .zip(g.values().iter())
                    .map(|(wi, gi)| (wi - gi).abs() / gi)
                    .fold(0.0_f64, f64::max);
                violated = err > radius;
            }
        }
        if violated && rel_step > conservative {
            rel_step = (rel_step * 0.5).max(conservative);
            continue;
        }
        beta_hat = beta_next;
        w = w_next;
        accepted += 1;
    }
    compute_weight(a, s, &w, k_err, cfg, rng)
}
