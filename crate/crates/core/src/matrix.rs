//! Dense complex linear algebra over operator spaces.
//!
//! Composite spaces `H_A ⊗ H_B ⊗ ...` use the A-major basis ordering: the
//! basis vector `|a⟩⊗|b⟩` sits at linear index `a * d_B + b`, so the leftmost
//! factor varies slowest. Every partial operation in this module follows that
//! convention.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix; the carrier for states, Choi operators, Kraus
/// operators and isometries.
pub type ComplexMatrix = DMatrix<C64>;

/// Tolerance for accepting a matrix as Hermitian before symmetrizing it.
pub const EPS_HERM: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Ordered factorization of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDims(Vec<usize>);

impl SubsystemDims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidParameter("subsystem list is empty".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions must be >= 1, got {dims:?}"
            )));
        }
        Ok(Self(dims))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension of the full composite space.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    /// Linear offsets of every multi-index over `subset`, enumerated with the
    /// first listed subsystem slowest.
    fn offsets(&self, subset: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &s in subset {
            let mut next = Vec::with_capacity(out.len() * self.0[s]);
            for &base in &out {
                for i in 0..self.0[s] {
                    next.push(base + i * strides[s]);
                }
            }
            out = next;
        }
        out
    }

    fn check_square(&self, x: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if x.nrows() != n || x.ncols() != n {
            return Err(mismatch(format!(
                "{}x{} matrix indexed by subsystems {:?} (product {n})",
                x.nrows(),
                x.ncols(),
                self.0
            )));
        }
        Ok(())
    }
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Matrix unit `|i⟩⟨j|` of side `d`.
pub fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// Column vector `|i⟩` of length `d`.
pub fn ket(d: usize, i: usize) -> ComplexMatrix {
    let mut m = zeros(d, 1);
    m[(i, 0)] = ONE;
    m
}

pub fn from_real_diagonal(diag: &[f64]) -> ComplexMatrix {
    let mut m = zeros(diag.len(), diag.len());
    for (i, &v) in diag.iter().enumerate() {
        m[(i, i)] = C64::new(v, 0.0);
    }
    m
}

/// Kronecker product with `a` as the slow (major) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(x: &ComplexMatrix) -> C64 {
    x.diagonal().iter().copied().sum()
}

pub fn frobenius_norm(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest entrywise modulus of `x - x^H`.
pub fn hermitian_deviation(x: &ComplexMatrix) -> f64 {
    if !x.is_square() {
        return f64::INFINITY;
    }
    let n = x.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(x: &ComplexMatrix) -> ComplexMatrix {
    (x + x.adjoint()).scale(0.5)
}

fn checked_hermitian(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(mismatch(format!(
            "expected a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let deviation = hermitian_deviation(x);
    if deviation > EPS_HERM * frobenius_norm(x).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(hermitian_part(x))
}

/// Traces out every subsystem not listed in `keep`. The kept factors appear in
/// ascending subsystem order.
pub fn partial_trace(x: &ComplexMatrix, dims: &SubsystemDims, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_square(x)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(mismatch(format!(
            "subsystem {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let keep_off = dims.offsets(&kept);
    let trace_off = dims.offsets(&traced);
    let m = keep_off.len();
    let mut out = zeros(m, m);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += x[(ro + t, co + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the indices of one subsystem, leaving the others untouched.
pub fn partial_transpose(x: &ComplexMatrix, dims: &SubsystemDims, subsystem: usize) -> Result<ComplexMatrix> {
    dims.check_square(x)?;
    if subsystem >= dims.len() {
        return Err(mismatch(format!(
            "subsystem {subsystem} out of range for {} factors",
            dims.len()
        )));
    }
    let others: Vec<usize> = (0..dims.len()).filter(|&k| k != subsystem).collect();
    let rest = dims.offsets(&others);
    let local = dims.offsets(&[subsystem]);
    let mut out = zeros(x.nrows(), x.ncols());
    for &ro in &rest {
        for &co in &rest {
            for &i in &local {
                for &j in &local {
                    out[(ro + j, co + i)] = x[(ro + i, co + j)];
                }
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of
/// the input.
pub fn permute_subsystems(x: &ComplexMatrix, dims: &SubsystemDims, perm: &[usize]) -> Result<ComplexMatrix> {
    dims.check_square(x)?;
    let mut seen = perm.to_vec();
    seen.sort_unstable();
    if seen != (0..dims.len()).collect::<Vec<_>>() {
        return Err(mismatch(format!(
            "{perm:?} is not a permutation of {} factors",
            dims.len()
        )));
    }
    let new_dims = SubsystemDims(perm.iter().map(|&p| dims.0[p]).collect());
    let in_strides = dims.strides();
    let out_strides = new_dims.strides();
    // stride, in the permuted layout, of each input factor
    let mut dest = vec![0usize; dims.len()];
    for (k, &p) in perm.iter().enumerate() {
        dest[p] = out_strides[k];
    }
    let n = dims.total();
    let map: Vec<usize> = (0..n)
        .map(|idx| {
            dims.0
                .iter()
                .enumerate()
                .map(|(k, &d)| (idx / in_strides[k]) % d * dest[k])
                .sum()
        })
        .collect();
    let mut out = zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = x[(r, c)];
        }
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Reassembles `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            let w = f(v);
            scaled.column_mut(k).scale_mut(w);
        }
        let out = &scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

/// Eigendecomposition of `(X + X^H)/2`, after checking `X` is Hermitian to
/// within [`EPS_HERM`] (relative to its Frobenius norm when that exceeds 1).
pub fn hermitian_eigen(x: &ComplexMatrix) -> Result<HermitianEigen> {
    let h = checked_hermitian(x)?;
    Ok(eigen_unchecked(h))
}

fn eigen_unchecked(h: ComplexMatrix) -> HermitianEigen {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

pub fn min_eigenvalue(x: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(x)?.min())
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues are
/// clipped to zero.
pub fn project_psd(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigen(x)?.reconstruct(|v| v.max(0.0)))
}

/// Projection together with the minimum eigenvalue of the input, sharing a
/// single decomposition.
pub(crate) fn project_psd_with_min(x: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let eig = eigen_unchecked(hermitian_part(x));
    (eig.reconstruct(|v| v.max(0.0)), eig.min())
}

pub(crate) fn min_eigenvalue_unchecked(x: &ComplexMatrix) -> f64 {
    let h = hermitian_part(x);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Real coordinates of a Hermitian matrix in an orthonormal Hermitian basis.
///
/// Slot `i*d + j` holds `Re x_ii` on the diagonal, `√2 Re x_ij` for `i < j`
/// and `√2 Im x_ji` for `i > j`. The map is a linear isometry from the
/// Frobenius inner product to the Euclidean one.
pub fn vectorize_hermitian(x: &ComplexMatrix) -> DVector<f64> {
    let d = x.nrows();
    let s = std::f64::consts::SQRT_2;
    DVector::from_fn(d * d, |p, _| {
        let (i, j) = (p / d, p % d);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => x[(i, i)].re,
            // average the two triangles so slightly non-Hermitian input maps
            // to its Hermitian part
            std::cmp::Ordering::Less => s * 0.5 * (x[(i, j)].re + x[(j, i)].re),
            std::cmp::Ordering::Greater => s * 0.5 * (x[(j, i)].im - x[(i, j)].im),
        }
    })
}

/// Inverse of [`vectorize_hermitian`].
pub fn devectorize_hermitian(v: &DVector<f64>, d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(mismatch(format!(
            "vector of length {} cannot describe a {d}x{d} Hermitian matrix",
            v.len()
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = zeros(d, d);
    for i in 0..d {
        x[(i, i)] = C64::new(v[i * d + i], 0.0);
        for j in (i + 1)..d {
            let z = C64::new(h * v[i * d + j], h * v[j * d + i]);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
        }
    }
    Ok(x)
}
