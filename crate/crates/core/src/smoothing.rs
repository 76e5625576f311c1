//! Soft-max potential machinery for tracking a hidden vector from noisy
//! observations (the "chasing zero" game), and the exact projection onto
//! the intersection of a weighted-norm ball and an ℓ∞ box.
//!
//! The path-following loop keeps ‖log g(s) − log w‖_∞ small while only
//! seeing a noisy estimate of g(s). That is modeled as a game: an
//! adversary moves the hidden vector within a convex set U each round,
//! the player sees the vector up to ℓ∞ error R and replies with a move
//! from (1+ε)·U chosen by a gradient step on the potential
//! Φ_μ(x) = Σᵢ (e^{μxᵢ} + e^{−μxᵢ}).

use std::io::Write;

use nalgebra::DVector;
use thiserror::Error;

use crate::weights::WeightVector;

/// Arguments of the exponential above this raise [`SmoothingError::Overflow`]
/// instead of producing infinities.
pub const OVERFLOW_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SmoothingError {
    #[error("potential overflow: mu*|x_i| = {0:.3e} exceeds the guard")]
    Overflow(f64),
    #[error("cannot project the zero vector")]
    ZeroVector,
    #[error("trace write failed: {0}")]
    Trace(String),
}

/// Potential sharpness and game parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialConfig {
    pub mu: f64,
    /// Observation error radius (ℓ∞).
    pub r_obs: f64,
    /// Player's step inflation ε.
    pub eps_game: f64,
}

impl PotentialConfig {
    /// The centering parameterization: μ = ε/(12R).
    pub fn for_centering(r_obs: f64, eps_game: f64) -> Self {
        Self {
            mu: eps_game / (12.0 * r_obs),
            r_obs,
            eps_game,
        }
    }
}

/// The move set U = {y : ‖y‖_W ≤ weight_norm_bound, ‖y‖_∞ ≤ inf_norm_bound}.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveSet {
    pub weight_norm_bound: f64,
    pub inf_norm_bound: f64,
    pub w: WeightVector,
}

impl MoveSet {
    pub fn contains(&self, y: &DVector<f64>, slack: f64) -> bool {
        let wn = y
            .iter()
            .zip(self.w.values().iter())
            .map(|(yi, wi)| wi * yi * yi)
            .sum::<f64>()
            .sqrt();
        wn <= self.weight_norm_bound * (1.0 + slack)
            && y.amax() <= self.inf_norm_bound * (1.0 + slack)
    }
}

/// Φ_μ(x) = Σᵢ (e^{μxᵢ} + e^{−μxᵢ}).
pub fn potential(x: &DVector<f64>, mu: f64) -> Result<f64, SmoothingError> {
    let mut acc = 0.0;
    for xi in x.iter() {
        let arg = mu * xi.abs();
        if arg > OVERFLOW_GUARD {
            return Err(SmoothingError::Overflow(arg));
        }
        acc += arg.exp() + (-arg).exp();
    }
    Ok(acc)
}

/// ∇Φ_μ(x), entrywise μ·sign(xᵢ)·(e^{μ|xᵢ|} − e^{−μ|xᵢ|}).
pub fn potential_gradient(x: &DVector<f64>, mu: f64) -> Result<DVector<f64>, SmoothingError> {
    let mut g = DVector::zeros(x.len());
    for (i, xi) in x.iter().enumerate() {
        let arg = mu * xi.abs();
        if arg > OVERFLOW_GUARD {
            return Err(SmoothingError::Overflow(arg));
        }
        g[i] = mu * xi.signum() * (arg.exp() - (-arg).exp());
    }
    Ok(g)
}

/// Exact maximizer of ⟨a,x⟩ over {‖x‖₂ ≤ 1, |xᵢ| ≤ lᵢ}.
///
/// Scan algorithm: normalize a, sort coordinates by |aᵢ|/lᵢ descending
/// (ties by ascending index; aᵢ = 0 sorts last), then find the shortest
/// prefix whose clamping leaves the remaining mass feasible:
/// (1 − Σ_prefix l²)/(1 − Σ_prefix a²) ≤ l²/a² of the next coordinate.
/// The prefix is clamped to ±l and the suffix scaled by the square-root
/// ratio.
pub fn project_onto_ball_box(
    a: &DVector<f64>,
    l: &DVector<f64>,
) -> Result<DVector<f64>, SmoothingError> {
    let m = a.len();
    let norm = a.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SmoothingError::ZeroVector);
    }
    let u: DVector<f64> = a / norm;
    // Box bounds above the ball radius can never be active; capping them
    // here also makes +∞ sentinels safe to square.
    let l_eff: Vec<f64> = l.iter().map(|v| v.min(2.0)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        let ki = u[i].abs() / l_eff[i];
        let kj = u[j].abs() / l_eff[j];
        kj.partial_cmp(&ki).unwrap().then(i.cmp(&j))
    });
    let mut sl2 = 0.0; // Σ l² over the clamped prefix
    let mut sa2 = 0.0; // Σ a² over the clamped prefix
    let mut prefix = 0;
    #[cfg(debug_assertions)]
    let mut prev_ratio = f64::NEG_INFINITY;
    while prefix < m {
        let j = order[prefix];
        let aj2 = u[j] * u[j];
        let lj2 = l_eff[j] * l_eff[j];
        // Stop when clamping j is no longer necessary:
        // (1 − Σl²)/(1 − Σa²) ≤ l²/a², cross-multiplied because the
        // numerator can be negative and a² can be zero.
        if aj2 == 0.0 || (1.0 - sl2) * aj2 <= lj2 * (1.0 - sa2) {
            break;
        }
        #[cfg(debug_assertions)]
        {
            // The scan ratio is nondecreasing in the prefix length; this
            // is what makes "first feasible prefix" well defined.
            if (1.0 - sa2) > 1e-15 {
                let ratio = (1.0 - sl2) / (1.0 - sa2);
                debug_assert!(ratio >= prev_ratio - 1e-9, "scan ratio decreased");
                prev_ratio = ratio;
            }
        }
        sl2 += lj2;
        sa2 += aj2;
        prefix += 1;
    }
    let rem_mass = (1.0 - sl2).max(0.0);
    let rem_a = 1.0 - sa2;
    let scale = if rem_a > 1e-300 {
        (rem_mass / rem_a).sqrt()
    } else {
        0.0
    };
    let mut x = DVector::zeros(m);
    for (pos, &j) in order.iter().enumerate() {
        if pos < prefix {
            x[j] = u[j].signum() * l_eff[j];
        } else {
            x[j] = scale * u[j];
        }
    }
    Ok(x)
}

/// The player's move: (1+ε)·argmin_{y ∈ U} ⟨∇Φ_μ(z), y⟩, computed by
/// mapping U into the unit-ball/box frame (xᵢ = yᵢ√wᵢ/b, lᵢ = c√wᵢ/b)
/// and projecting. A zero gradient yields the zero move.
pub fn chasing_zero_move(
    observed: &DVector<f64>,
    moveset: &MoveSet,
    cfg: &PotentialConfig,
) -> Result<DVector<f64>, SmoothingError> {
    let grad = potential_gradient(observed, cfg.mu)?;
    let m = grad.len();
    let b = moveset.weight_norm_bound;
    let sqrt_w: Vec<f64> = moveset.w.values().iter().map(|v| v.sqrt()).collect();
    let a = DVector::from_fn(m, |i, _| grad[i] / sqrt_w[i]);
    let l = DVector::from_fn(m, |i, _| moveset.inf_norm_bound * sqrt_w[i] / b);
    let x = match project_onto_ball_box(&a, &l) {
        Ok(x) => x,
        Err(SmoothingError::ZeroVector) => return Ok(DVector::zeros(m)),
        Err(e) => return Err(e),
    };
    let inflate = 1.0 + cfg.eps_game;
    Ok(DVector::from_fn(m, |i, _| -inflate * b * x[i] / sqrt_w[i]))
}

/// One round of the game as supplied by the adversary: the move set for
/// the round, the hidden move u ∈ U applied to the state, and the
/// observation noise (‖noise‖_∞ ≤ R).
pub struct AdversaryRound {
    pub move_set: MoveSet,
    pub hidden_move: DVector<f64>,
    pub noise: DVector<f64>,
}

/// Game trajectory: potential and sup-norm after each round. `truncated`
/// is set if the potential overflowed (the analysis regime was left).
#[derive(Debug, Clone)]
pub struct GameTrajectory {
    pub phi: Vec<f64>,
    pub sup_norm: Vec<f64>,
    pub final_state: DVector<f64>,
    pub truncated: bool,
}

/// Run the chasing-zero game for `rounds` rounds from state `x0` with
/// the gradient-step strategy. Optionally writes a CSV trace
/// (round, phi, sup_norm).
pub fn play_chasing_zero(
    adversary: &mut dyn FnMut(usize, &DVector<f64>) -> AdversaryRound,
    rounds: usize,
    x0: DVector<f64>,
    cfg: &PotentialConfig,
    mut trace: Option<&mut dyn Write>,
) -> Result<GameTrajectory, SmoothingError> {
    let mut x = x0;
    let mut traj = GameTrajectory {
        phi: Vec::with_capacity(rounds),
        sup_norm: Vec::with_capacity(rounds),
        final_state: x.clone(),
        truncated: false,
    };
    if let Some(w) = trace.as_deref_mut() {
        writeln!(w, "round,phi,sup_norm").map_err(|e| SmoothingError::Trace(e.to_string()))?;
    }
    for round in 0..rounds {
        let AdversaryRound {
            move_set,
            hidden_move,
            noise,
        } = adversary(round, &x);
        let y = &x + &hidden_move;
        let z = &y + &noise;
        let step = match chasing_zero_move(&z, &move_set, cfg) {
            Ok(s) => s,
            Err(SmoothingError::Overflow(_)) => {
                traj.truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        x = y + step;
        match potential(&x, cfg.mu) {
            Ok(phi) => {
                traj.phi.push(phi);
                traj.sup_norm.push(x.amax());
                if let Some(w) = trace.as_deref_mut() {
                    writeln!(w, "{round},{phi},{}", x.amax())
                        .map_err(|e| SmoothingError::Trace(e.to_string()))?;
                }
            }
            Err(SmoothingError::Overflow(_)) => {
                traj.truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    traj.final_state = x;
    Ok(traj)
}
