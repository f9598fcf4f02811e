//! PSD-cone / affine-subspace feasibility by alternating projections.
//!
//! Problems have the form: find Hermitian `X ⪰ 0` with `M vec(X) = b`, where
//! `vec` is [`vectorize_hermitian`]. The solver alternates the Frobenius
//! projection onto the PSD cone (with a Dykstra correction term) and the
//! Euclidean projection onto the affine set. It has no dual certificates:
//! infeasibility is reported only when the residual stalls well above the
//! tolerance.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR};
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::matrix::{self, devectorize_hermitian, vectorize_hermitian, ComplexMatrix};

/// Affine constraints `M vec(X) = b` on a Hermitian variable of side `side`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConstraintSet {
    side: usize,
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl AffineConstraintSet {
    pub fn new(side: usize, matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidParameter("variable side must be >= 1".into()));
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidParameter("at least one constraint row is required".into()));
        }
        if matrix.ncols() != side * side {
            return Err(mismatch(format!(
                "constraint matrix has {} columns, expected {} for a {side}x{side} variable",
                matrix.ncols(),
                side * side
            )));
        }
        if matrix.nrows() != rhs.len() {
            return Err(mismatch(format!(
                "{} constraint rows but {} right-hand sides",
                matrix.nrows(),
                rhs.len()
            )));
        }
        if matrix.iter().chain(rhs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("constraints contain non-finite values".into()));
        }
        Ok(Self { side, matrix, rhs })
    }

    /// The single constraint `Tr X = value`.
    pub fn trace_equals(side: usize, value: f64) -> Self {
        let row = vectorize_hermitian(&matrix::identity(side)).transpose();
        Self {
            side,
            matrix: DMatrix::from_row_slice(1, side * side, row.as_slice()),
            rhs: DVector::from_element(1, value),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// `‖M vec(X) - b‖₂`.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        self.residual_vec(&vectorize_hermitian(x))
    }

    fn residual_vec(&self, v: &DVector<f64>) -> f64 {
        (&self.matrix * v - &self.rhs).norm()
    }
}

/// Euclidean projector onto `{x : Mx = b}`, precomputed once per problem.
/// Rank-deficient `M` is handled by dropping negligible directions of the row
/// space; inconsistent `b` yields the least-squares set.
#[derive(Debug, Clone)]
pub struct AffineProjector {
    /// Orthonormal basis of the row space of `M`, as columns.
    row_basis: DMatrix<f64>,
    /// Least-norm least-squares solution `M^+ b`.
    offset: DVector<f64>,
    side: usize,
}

impl AffineProjector {
    pub fn new(constraints: &AffineConstraintSet) -> Self {
        let m = &constraints.matrix;
        let n = m.ncols();
        // Row space from the spectrum of the r x r Gram matrix, orthonormalized
        // by Householder QR. Singular values below 1e-7 of the largest count
        // as zero.
        let gram = m * m.transpose();
        let eig = SymmetricEigen::new(gram);
        let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k] > lmax * 1e-14)
            .collect();
        if keep.is_empty() {
            return Self {
                row_basis: DMatrix::zeros(n, 0),
                offset: DVector::zeros(n),
                side: constraints.side,
            };
        }
        let mut left = DMatrix::zeros(m.nrows(), keep.len());
        for (col, &k) in keep.iter().enumerate() {
            left.set_column(col, &eig.eigenvectors.column(k));
        }
        let row_basis = QR::new(m.transpose() * left).q();
        // M U has full column rank; its QR gives the least-squares coordinates.
        let qr = QR::new(m * &row_basis);
        let coords = qr
            .r()
            .solve_upper_triangular(&(qr.q().transpose() * &constraints.rhs))
            .expect("M U has full column rank");
        let offset = &row_basis * coords;
        Self {
            row_basis,
            offset,
            side: constraints.side,
        }
    }

    /// Numerical rank of the constraint matrix.
    pub fn rank(&self) -> usize {
        self.row_basis.ncols()
    }

    fn project_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.row_basis.tr_mul(v);
        v - &self.row_basis * coeffs + &self.offset
    }

    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.side, self.side) {
            return Err(mismatch(format!(
                "{}x{} point for a {}x{} affine set",
                x.nrows(),
                x.ncols(),
                self.side,
                self.side
            )));
        }
        devectorize_hermitian(&self.project_vec(&vectorize_hermitian(x)), self.side)
    }
}

/// Euclidean projection of `x` onto `{X : M vec(X) = b}`.
pub fn project_affine(x: &ComplexMatrix, constraints: &AffineConstraintSet) -> Result<ComplexMatrix> {
    AffineProjector::new(constraints).project(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialPoint {
    /// `x₀ = project_affine(0)`.
    AffineProjectionOfZero,
    /// `x₀ = project_affine(I)`.
    AffineProjectionOfIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps_feas: f64,
    pub max_iter: usize,
    /// Minimum improvement of the combined residual over `plateau_window`
    /// iterations; below it the run is considered stalled.
    pub eps_plateau: f64,
    pub plateau_window: usize,
    pub initial_point: InitialPoint,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_feas: 1e-7,
            max_iter: 20_000,
            eps_plateau: 1e-12,
            plateau_window: 1000,
            initial_point: InitialPoint::AffineProjectionOfZero,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_feas > 0.0 && self.eps_feas.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps_feas must be positive, got {}", self.eps_feas)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if self.plateau_window == 0 {
            return Err(Error::InvalidParameter("plateau_window must be >= 1".into()));
        }
        if self.eps_plateau < 0.0 {
            return Err(Error::InvalidParameter("eps_plateau must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityStatus {
    Feasible,
    NotFeasibleAtTolerance,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    /// Last affine iterate; present iff `status` is `Feasible`.
    pub solution: Option<ComplexMatrix>,
    /// `‖M vec(X) - b‖₂` at the last iterate.
    pub residual_affine: f64,
    /// `max(0, -λ_min(X))` at the last iterate.
    pub residual_psd: f64,
    pub iterations: usize,
    /// Combined residual `residual_affine + residual_psd` after every
    /// iteration, starting with the initial point.
    pub history: Vec<f64>,
}

impl FeasibilityReport {
    pub fn combined_residual(&self) -> f64 {
        self.residual_affine + self.residual_psd
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Dykstra-corrected alternating projections between the PSD cone and the
/// affine set. Deterministic for a given problem and configuration.
/// A feasible iterate is refined toward `eps_feas * POLISH_FACTOR`.
const POLISH_FACTOR: f64 = 1e-3;

pub fn solve(constraints: &AffineConstraintSet, config: &SolverConfig) -> Result<FeasibilityReport> {
    config.validate()?;
    let side = constraints.side;
    let projector = AffineProjector::new(constraints);

    let start = match config.initial_point {
        InitialPoint::AffineProjectionOfZero => DVector::zeros(side * side),
        InitialPoint::AffineProjectionOfIdentity => vectorize_hermitian(&matrix::identity(side)),
    };
    let mut x = projector.project_vec(&start);
    // Dykstra increment of the cone step; the affine step needs none.
    let mut increment = DVector::<f64>::zeros(side * side);

    let measure = |v: &DVector<f64>| -> Result<(f64, f64)> {
        let xm = devectorize_hermitian(v, side)?;
        let min = matrix::min_eigenvalue_unchecked(&xm);
        Ok((constraints.residual_vec(v), (-min).max(0.0)))
    };

    let (mut res_aff, mut res_psd) = measure(&x)?;
    let mut history = Vec::with_capacity(config.max_iter.min(100_000) + 1);
    history.push(res_aff + res_psd);
    let converged = |a: f64, p: f64| a < config.eps_feas && p < config.eps_feas;

    let finish = |status, x: &DVector<f64>, res_aff, res_psd, iterations, history| -> Result<FeasibilityReport> {
        let solution = match status {
            FeasibilityStatus::Feasible => Some(devectorize_hermitian(x, side)?),
            _ => None,
        };
        Ok(FeasibilityReport {
            status,
            solution,
            residual_affine: res_aff,
            residual_psd: res_psd,
            iterations,
            history,
        })
    };

    if converged(res_aff, res_psd) {
        return finish(FeasibilityStatus::Feasible, &x, res_aff, res_psd, 0, history);
    }

    for iter in 1..=config.max_iter {
        let shifted = &x + &increment;
        let (cone_point, _) = matrix::project_psd_with_min(&devectorize_hermitian(&shifted, side)?);
        let y = vectorize_hermitian(&cone_point);
        increment = shifted - &y;
        x = projector.project_vec(&y);

        (res_aff, res_psd) = measure(&x)?;
        let combined = res_aff + res_psd;
        history.push(combined);

        if converged(res_aff, res_psd) {
            // polish: downstream constructions consume the witness, so spend
            // at most one plateau window driving it further into the set
            let target = config.eps_feas * POLISH_FACTOR;
            let mut best = (x.clone(), res_aff, res_psd);
            let mut total = iter;
            while best.1 + best.2 > target && total < iter + config.plateau_window {
                let shifted = &x + &increment;
                let (cone_point, _) = matrix::project_psd_with_min(&devectorize_hermitian(&shifted, side)?);
                let y = vectorize_hermitian(&cone_point);
                increment = shifted - &y;
                x = projector.project_vec(&y);
                (res_aff, res_psd) = measure(&x)?;
                history.push(res_aff + res_psd);
                total += 1;
                if res_aff + res_psd < best.1 + best.2 {
                    best = (x.clone(), res_aff, res_psd);
                }
            }
            let (x, res_aff, res_psd) = best;
            return finish(FeasibilityStatus::Feasible, &x, res_aff, res_psd, total, history);
        }
        if iter % config.plateau_window == 0 {
            let before = history[iter - config.plateau_window];
            if before - combined < config.eps_plateau && combined >= 10.0 * config.eps_feas {
                return finish(FeasibilityStatus::NotFeasibleAtTolerance, &x, res_aff, res_psd, iter, history);
            }
        }
    }
    finish(
        FeasibilityStatus::IterationLimit,
        &x,
        res_aff,
        res_psd,
        config.max_iter,
        history,
    )
}
