//! Weighted central-path interior point method for linear programming.
//!
//! Solves `min cᵀx  s.t.  Ax ≥ b` by following a *weighted* central path:
//! alongside the iterate `x` the solver maintains a positive weight vector
//! `w` for the log-barrier `−Σ wᵢ log sᵢ`, chosen as the minimizer of a
//! regularized log-det objective. The weights concentrate barrier mass on
//! geometrically important constraints, which makes the iteration count
//! scale with the number of variables rather than the number of
//! constraints and makes the method immune to constraint duplication.
//!
//! Module map:
//!
//! - [`linalg`]: dense weighted normal-equation solves (Cholesky with an
//!   explicit inexactness contract), exact and sketched leverage scores,
//!   slack sensitivity.
//! - [`weights`]: the regularized weight function `g(s)` — objective,
//!   gradient, Jacobian, exact fixed-point computation, sketched
//!   computation, and the homotopy initializer.
//! - [`smoothing`]: soft-max potential machinery for tracking the weight
//!   function from noisy estimates, and the exact projection onto the
//!   intersection of a weighted-norm ball and an ℓ∞ box.
//! - [`path`]: Newton steps, centrality, r-steps, exact and inexact
//!   centering, and the path-following loop with invariant audits and
//!   rollback.
//! - [`driver`]: end-to-end LP solving — reduction to a bounded feasible
//!   program with a known interior point, cost perturbation for a unique
//!   optimum, initialization, path following, status classification, and
//!   active-set rounding.

pub mod driver;
pub mod linalg;
pub mod path;
pub mod smoothing;
pub mod weights;

pub use driver::{solve, RawLP, SolveMode, SolveOptions, SolveReport, SolveStatus};
pub use linalg::{ConstraintMatrix, DiagonalVector, LinalgError, SolveTolerance};
pub use path::{CenteringConfig, CentralityReport, PathError, WeightedIterate};
pub use weights::{WeightConfig, WeightError, WeightVector};
