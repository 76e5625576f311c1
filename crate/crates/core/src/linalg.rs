//! Dense linear algebra for the solver: weighted normal equations with an
//! explicit relative-accuracy contract, exact and sketched leverage
//! scores, and slack sensitivity.
//!
//! Everything here is dense and desk-scale by design. The rest of the
//! solver only interacts with these operations through their contracts,
//! so a sparse or iterative backend could be swapped in behind the same
//! signatures.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

/// An R-factor diagonal entry below this fraction of its column's norm
/// in the scaled matrix declares structural rank deficiency. Genuine
/// column dependence collapses the entry to machine noise (~1e-16 of
/// the column scale), while mere ill-conditioning keeps it well above
/// this line.
pub const RANK_FLOOR_RATIO: f64 = 1e-13;

/// Constant in the sketch-size formula `k = ⌈C·ln(m)/ε²⌉` (natural log).
pub const JL_SKETCH_CONSTANT: f64 = 24.0;

/// Process-wide count of triangular solves performed against factorized
/// normal matrices. Diagnostic only; reported by the LP driver.
static SOLVE_COUNT: AtomicU64 = AtomicU64::new(0);

/// Current value of the process-wide linear-solve counter.
pub fn linear_solve_count() -> u64 {
    SOLVE_COUNT.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("normal matrix is rank deficient: pivot {pivot:.3e} below floor {floor:.3e} at column {column}")]
    RankDeficient {
        column: usize,
        pivot: f64,
        floor: f64,
    },
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {0} of the constraint matrix is identically zero")]
    ZeroRow(usize),
    #[error("column {0} of the constraint matrix is identically zero")]
    ZeroColumn(usize),
    #[error("constraint matrix has {rows} rows and {cols} columns; need rows >= cols")]
    FewerRowsThanCols { rows: usize, cols: usize },
}

/// An m×n constraint matrix with m ≥ n, no all-zero row or column.
/// Full column rank is checked lazily: any normal-equation factorization
/// fails with [`LinalgError::RankDeficient`] if it is violated.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    a: DMatrix<f64>,
}

impl ConstraintMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self, LinalgError> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                context: "constraint matrix",
            });
        }
        if a.nrows() < a.ncols() {
            return Err(LinalgError::FewerRowsThanCols {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        for i in 0..a.nrows() {
            if a.row(i).iter().all(|v| *v == 0.0) {
                return Err(LinalgError::ZeroRow(i));
            }
        }
        for j in 0..a.ncols() {
            if a.column(j).iter().all(|v| *v == 0.0) {
                return Err(LinalgError::ZeroColumn(j));
            }
        }
        Ok(Self { a })
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Matrix with row i multiplied by `factors[i]`. Factors must be
    /// strictly positive so the shape invariants are preserved.
    pub fn scale_rows(&self, factors: &DVector<f64>) -> ConstraintMatrix {
        debug_assert_eq!(factors.len(), self.rows());
        debug_assert!(factors.iter().all(|f| *f > 0.0));
        let mut scaled = self.a.clone();
        for i in 0..scaled.nrows() {
            let f = factors[i];
            for j in 0..scaled.ncols() {
                scaled[(i, j)] *= f;
            }
        }
        ConstraintMatrix { a: scaled }
    }

    /// `Aᵀ v` without forming intermediates.
    pub fn transpose_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(v)
    }

    /// `A v`.
    pub fn mul(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.a * v
    }
}

/// A strictly positive, finite length-m vector interpreted as a diagonal
/// matrix (slacks, weights, scalings).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalVector {
    values: DVector<f64>,
}

impl DiagonalVector {
    pub fn new(values: DVector<f64>) -> Result<Self, LinalgError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                context: "diagonal vector",
            });
        }
        if values.iter().any(|v| *v <= 0.0) {
            return Err(LinalgError::NonFinite {
                context: "diagonal vector (non-positive entry)",
            });
        }
        Ok(Self { values })
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
}

/// Relative-accuracy contract for normal-equation solves: the returned y
/// satisfies ‖y − (AᵀDA)⁻¹rhs‖_{AᵀDA} ≤ relative_accuracy·‖(AᵀDA)⁻¹rhs‖_{AᵀDA}.
/// The Cholesky backend is exact to round-off; refinement steps tighten
/// the residual when the system is ill-conditioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveTolerance {
    pub relative_accuracy: f64,
    pub max_refinement_steps: usize,
}

impl Default for SolveTolerance {
    fn default() -> Self {
        Self {
            relative_accuracy: 1e-12,
            max_refinement_steps: 2,
        }
    }
}

/// Triangular factorization of the weighted normal matrix AᵀDA, held as
/// the lower factor L with LLᵀ = AᵀDA. L is computed as the transposed
/// R-factor of a QR decomposition of D^{1/2}A: the normal matrix squares
/// the condition number and its Cholesky cancels catastrophically when a
/// few huge-scale rows dominate, while QR of the scaled matrix works at
/// the unsquared condition number. Immutable after construction; shared
/// freely across solves.
#[derive(Debug, Clone)]
pub struct NormalEqFactorization {
    /// Lower-triangular factor L with LLᵀ = AᵀDA.
    l: DMatrix<f64>,
    /// The normal matrix itself, kept for residual computation.
    normal: DMatrix<f64>,
}

impl NormalEqFactorization {
    pub fn new(a: &ConstraintMatrix, d: &DiagonalVector) -> Result<Self, LinalgError> {
        if d.len() != a.rows() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.rows(),
                got: d.len(),
            });
        }
        let scaled = {
            let mut s = a.as_matrix().clone();
            for i in 0..s.nrows() {
                let di = d.values()[i].sqrt();
                for j in 0..s.ncols() {
                    s[(i, j)] *= di;
                }
            }
            s
        };
        let n = scaled.ncols();
        let r = scaled.clone().qr().unpack_r();
        let mut l = DMatrix::zeros(n, n);
        for i in 0..n {
            // Householder QR leaves the diagonal signs arbitrary; flip
            // each row of R so L = Rᵀ is a genuine Cholesky factor.
            let sign = if r[(i, i)] < 0.0 { -1.0 } else { 1.0 };
            for j in i..n {
                l[(j, i)] = sign * r[(i, j)];
            }
        }
        for j in 0..n {
            let pivot = l[(j, j)];
            if !pivot.is_finite() {
                return Err(LinalgError::NonFinite {
                    context: "qr pivot",
                });
            }
            let floor = RANK_FLOOR_RATIO * scaled.column(j).norm();
            if pivot <= floor {
                return Err(LinalgError::RankDeficient {
                    column: j,
                    pivot,
                    floor,
                });
            }
        }
        let normal = scaled.tr_mul(&scaled);
        Ok(Self { l, normal })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// One forward/backward substitution pass.
    pub fn solve_once(&self, rhs: &DVector<f64>) -> DVector<f64> {
        SOLVE_COUNT.fetch_add(1, Ordering::Relaxed);
        let mut y = rhs.clone();
        let n = self.dim();
        // Forward: L z = rhs.
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= self.l[(i, k)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        // Backward: Lᵀ x = z.
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in i + 1..n {
                v -= self.l[(k, i)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        y
    }

    /// Solve with iterative refinement up to the configured step cap.
    pub fn solve(&self, rhs: &DVector<f64>, tol: SolveTolerance) -> DVector<f64> {
        let mut x = self.solve_once(rhs);
        let rhs_norm = rhs.norm();
        if rhs_norm == 0.0 {
            return x;
        }
        for _ in 0..tol.max_refinement_steps {
            let residual = rhs - &self.normal * &x;
            if residual.norm() <= tol.relative_accuracy * rhs_norm {
                break;
            }
            x += self.solve_once(&residual);
        }
        x
    }

    /// log det(AᵀDA), from the Cholesky diagonal.
    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| 2.0 * self.l[(i, i)].ln()).sum()
    }

    /// Solve Lᵀ x = v (used to form rows of A L⁻ᵀ for norm estimation).
    pub fn solve_transposed_factor(&self, v: &DVector<f64>) -> DVector<f64> {
        SOLVE_COUNT.fetch_add(1, Ordering::Relaxed);
        let n = self.dim();
        let mut y = v.clone();
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= self.l[(k, i)] * y[k];
            }
            y[i] = acc / self.l[(i, i)];
        }
        y
    }
}

/// Approximate (AᵀDA)⁻¹·rhs within the relative-accuracy contract.
pub fn solve_normal_equations(
    a: &ConstraintMatrix,
    d: &DiagonalVector,
    rhs: &DVector<f64>,
    tol: SolveTolerance,
) -> Result<DVector<f64>, LinalgError> {
    if rhs.len() != a.cols() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.cols(),
            got: rhs.len(),
        });
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite {
            context: "right-hand side",
        });
    }
    let f = NormalEqFactorization::new(a, d)?;
    Ok(f.solve(rhs, tol))
}

/// Leverage scores σᵢ = (X^{1/2}A(AᵀXA)⁻¹AᵀX^{1/2})ᵢᵢ, computed row by
/// row against a single factorization — the m×m projection matrix is
/// never materialized.
pub fn exact_leverage_scores(
    a: &ConstraintMatrix,
    x: &DiagonalVector,
) -> Result<DVector<f64>, LinalgError> {
    let f = NormalEqFactorization::new(a, x)?;
    let m = a.rows();
    let mut sigma = DVector::zeros(m);
    for i in 0..m {
        let ai = a.as_matrix().row(i).transpose();
        let v = f.solve_once(&ai);
        sigma[i] = x.values()[i] * ai.dot(&v);
    }
    Ok(sigma)
}

/// Sketched leverage scores: k = ⌈C·ln(m)/ε²⌉ random ±1/√k probes
/// through the projection, sharing one factorization. Satisfies
/// (1−ε)σᵢ ≤ σᵢ^{apx} ≤ (1+ε)σᵢ for all i with probability ≥ 1 − 1/m.
pub fn approx_leverage_scores<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    x: &DiagonalVector,
    eps: f64,
    rng: &mut R,
) -> Result<DVector<f64>, LinalgError> {
    approx_leverage_scores_with(a, x, eps, JL_SKETCH_CONSTANT, rng)
}

/// Number of sketch vectors used by [`approx_leverage_scores_with`].
pub fn sketch_size(m: usize, eps: f64, sketch_constant: f64) -> usize {
    (sketch_constant * (m as f64).ln() / (eps * eps))
        .ceil()
        .max(1.0) as usize
}

/// [`approx_leverage_scores`] with an explicit sketch-size constant.
pub fn approx_leverage_scores_with<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    x: &DiagonalVector,
    eps: f64,
    sketch_constant: f64,
    rng: &mut R,
) -> Result<DVector<f64>, LinalgError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LinalgError::NonFinite {
            context: "sketch accuracy eps",
        });
    }
    let m = a.rows();
    let k = sketch_size(m, eps, sketch_constant);
    let f = NormalEqFactorization::new(a, x)?;
    let sqrt_x: DVector<f64> = x.values().map(f64::sqrt);
    let scale = 1.0 / (k as f64).sqrt();
    let mut sigma = DVector::zeros(m);
    for _ in 0..k {
        let q = DVector::from_fn(m, |_, _| if rng.gen::<bool>() { scale } else { -scale });
        // p = X^{1/2} A (AᵀXA)⁻¹ Aᵀ X^{1/2} q
        let xq = q.component_mul(&sqrt_x);
        let rhs = a.transpose_mul(&xq);
        let v = f.solve_once(&rhs);
        let p = a.mul(&v).component_mul(&sqrt_x);
        for i in 0..m {
            sigma[i] += p[i] * p[i];
        }
    }
    Ok(sigma)
}

/// Slack sensitivity γ(s,w) = maxᵢ √(1ᵢᵀ S⁻¹A (AᵀS⁻¹WS⁻¹A)⁻¹ AᵀS⁻¹ 1ᵢ):
/// the worst-case relative slack change induced by a unit Newton step.
/// Exact m-solve path; see [`slack_sensitivity_sketched`] for the fast path.
pub fn slack_sensitivity(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &DiagonalVector,
) -> Result<f64, LinalgError> {
    if s.len() != a.rows() || w.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: s.len().min(w.len()),
        });
    }
    let d = DiagonalVector::new(DVector::from_fn(a.rows(), |i, _| {
        w.values()[i] / (s.values()[i] * s.values()[i])
    }))?;
    let f = NormalEqFactorization::new(a, &d)?;
    let mut gamma_sq: f64 = 0.0;
    for i in 0..a.rows() {
        let bi = a.as_matrix().row(i).transpose() / s.values()[i];
        let v = f.solve_once(&bi);
        gamma_sq = gamma_sq.max(bi.dot(&v));
    }
    Ok(gamma_sq.max(0.0).sqrt())
}

/// Sketched slack sensitivity: row norms of S⁻¹A L⁻ᵀ estimated with k
/// Rademacher probes (L the Cholesky factor of AᵀS⁻¹WS⁻¹A).
pub fn slack_sensitivity_sketched<R: Rng + ?Sized>(
    a: &ConstraintMatrix,
    s: &DiagonalVector,
    w: &DiagonalVector,
    eps: f64,
    rng: &mut R,
) -> Result<f64, LinalgError> {
    let m = a.rows();
    let d = DiagonalVector::new(DVector::from_fn(m, |i, _| {
        w.values()[i] / (s.values()[i] * s.values()[i])
    }))?;
    let f = NormalEqFactorization::new(a, &d)?;
    let k = sketch_size(m, eps, JL_SKETCH_CONSTANT);
    let scale = 1.0 / (k as f64).sqrt();
    let mut norms_sq = DVector::zeros(m);
    for _ in 0..k {
        let q = DVector::from_fn(
            a.cols(),
            |_, _| if rng.gen::<bool>() { scale } else { -scale },
        );
        let v = f.solve_transposed_factor(&q);
        let p = a.mul(&v);
        for i in 0..m {
            let pi = p[i] / s.values()[i];
            norms_sq[i] += pi * pi;
        }
    }
    Ok(norms_sq.iter().fold(0.0_f64, |acc, v| acc.max(*v)).sqrt())
}

/// Dense projection matrix P = X^{1/2}A(AᵀXA)⁻¹AᵀX^{1/2}. Diagnostic /
/// test path only: O(m²) memory.
pub fn projection_matrix(
    a: &ConstraintMatrix,
    x: &DiagonalVector,
) -> Result<DMatrix<f64>, LinalgError> {
    let f = NormalEqFactorization::new(a, x)?;
    let m = a.rows();
    let sqrt_x: DVector<f64> = x.values().map(f64::sqrt);
    let mut p = DMatrix::zeros(m, m);
    for j in 0..m {
        let aj = a.as_matrix().row(j).transpose() * sqrt_x[j];
        let v = f.solve_once(&aj);
        let col = a.mul(&v);
        for i in 0..m {
            p[(i, j)] = sqrt_x[i] * col[i];
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cm(a: DMatrix<f64>) -> ConstraintMatrix {
        ConstraintMatrix::new(a).unwrap()
    }

    fn diag(v: &[f64]) -> DiagonalVector {
        DiagonalVector::new(DVector::from_row_slice(v)).unwrap()
    }

    #[test]
    fn solve_identity_system() {
        let a = cm(DMatrix::identity(2, 2));
        let y = solve_normal_equations(
            &a,
            &diag(&[1.0, 1.0]),
            &DVector::from_row_slice(&[3.0, -5.0]),
            SolveTolerance::default(),
        )
        .unwrap();
        assert_eq!(y.as_slice(), &[3.0, -5.0]);
    }

    #[test]
    fn solve_diagonal_system() {
        let a = cm(DMatrix::identity(2, 2));
        let y = solve_normal_equations(
            &a,
            &diag(&[2.0, 4.0]),
            &DVector::from_row_slice(&[2.0, 4.0]),
            SolveTolerance::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-14 && (y[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn solve_two_by_two_hand_inverse() {
        // AᵀA = [[2,1],[1,2]]; rhs (1,1) -> (1/3, 1/3).
        let a = cm(dmatrix![1.0, 0.0; 1.0, 1.0; 0.0, 1.0]);
        let y = solve_normal_equations(
            &a,
            &diag(&[1.0, 1.0, 1.0]),
            &DVector::from_row_slice(&[1.0, 1.0]),
            SolveTolerance::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((y[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_detected() {
        let a = cm(dmatrix![1.0, 1.0; 1.0, 1.0]);
        let err = solve_normal_equations(
            &a,
            &diag(&[1.0, 1.0]),
            &DVector::from_row_slice(&[1.0, 1.0]),
            SolveTolerance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, LinalgError::RankDeficient { .. }));
    }

    #[test]
    fn leverage_square_identity() {
        let a = cm(DMatrix::identity(2, 2));
        let sigma = exact_leverage_scores(&a, &diag(&[1.0, 1.0])).unwrap();
        assert!((sigma[0] - 1.0).abs() < 1e-14 && (sigma[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn leverage_rank_one_uniform() {
        let a = cm(dmatrix![1.0; 1.0; 1.0]);
        let sigma = exact_leverage_scores(&a, &diag(&[1.0, 1.0, 1.0])).unwrap();
        for i in 0..3 {
            assert!((sigma[i] - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn leverage_rank_one_closed_form() {
        let a = cm(dmatrix![1.0; 2.0; 3.0]);
        let sigma = exact_leverage_scores(&a, &diag(&[1.0, 1.0, 1.0])).unwrap();
        let expected = [1.0 / 14.0, 4.0 / 14.0, 9.0 / 14.0];
        for i in 0..3 {
            assert!((sigma[i] - expected[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn sketched_leverage_band_identity() {
        let a = cm(DMatrix::identity(2, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sigma = approx_leverage_scores(&a, &diag(&[1.0, 1.0]), 0.5, &mut rng).unwrap();
        for i in 0..2 {
            assert!(
                sigma[i] >= 0.5 && sigma[i] <= 1.5,
                "sigma[{i}] = {}",
                sigma[i]
            );
        }
    }

    #[test]
    fn sketched_leverage_band_rank_one() {
        let a = cm(dmatrix![1.0; 1.0; 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = approx_leverage_scores(&a, &diag(&[1.0, 1.0, 1.0]), 0.3, &mut rng).unwrap();
        for i in 0..3 {
            assert!(sigma[i] >= 0.7 / 3.0 && sigma[i] <= 1.3 / 3.0);
        }
    }

    #[test]
    fn sketched_leverage_converges_to_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = cm(DMatrix::from_fn(12, 3, |_, _| rng.gen_range(-1.0..1.0_f64)));
        let x = diag(&vec![1.0; 12]);
        let exact = exact_leverage_scores(&a, &x).unwrap();
        let apx = approx_leverage_scores(&a, &x, 0.01, &mut rng).unwrap();
        for i in 0..12 {
            assert!((apx[i] - exact[i]).abs() <= 0.02 * exact[i] + 1e-9);
        }
    }

    #[test]
    fn slack_sensitivity_identity_cases() {
        let a = cm(DMatrix::identity(2, 2));
        let g1 = slack_sensitivity(&a, &diag(&[1.0, 1.0]), &diag(&[1.0, 1.0])).unwrap();
        assert!((g1 - 1.0).abs() < 1e-14);
        let g2 = slack_sensitivity(&a, &diag(&[1.0, 1.0]), &diag(&[4.0, 4.0])).unwrap();
        assert!((g2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn sketched_slack_sensitivity_tracks_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = cm(DMatrix::from_fn(10, 2, |_, _| rng.gen_range(-1.0..1.0_f64)));
        let s = diag(&vec![1.0; 10]);
        let w = diag(&vec![1.0; 10]);
        let exact = slack_sensitivity(&a, &s, &w).unwrap();
        let apx = slack_sensitivity_sketched(&a, &s, &w, 0.05, &mut rng).unwrap();
        assert!((apx - exact).abs() <= 0.1 * exact);
    }

    #[test]
    fn normal_solve_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = cm(DMatrix::from_fn(8, 3, |_, _| rng.gen_range(-1.0..1.0_f64)));
        let d = diag(&(0..8).map(|_| rng.gen_range(0.5..2.0)).collect::<Vec<_>>());
        let rhs = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let y = solve_normal_equations(&a, &d, &rhs, SolveTolerance::default()).unwrap();
        let f = NormalEqFactorization::new(&a, &d).unwrap();
        let back = &f.normal * &y;
        assert!((back - &rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn shape_validation() {
        assert!(matches!(
            ConstraintMatrix::new(dmatrix![1.0, 2.0]),
            Err(LinalgError::FewerRowsThanCols { .. })
        ));
        assert!(matches!(
            ConstraintMatrix::new(dmatrix![1.0, 0.0; 0.0, 0.0]),
            Err(LinalgError::ZeroRow(1))
        ));
        assert!(matches!(
            ConstraintMatrix::new(dmatrix![1.0, 0.0; 1.0, 0.0]),
            Err(LinalgError::ZeroColumn(1))
        ));
    }
}
