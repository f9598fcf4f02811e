//! Quantum channels stored canonically as Choi operators, together with the
//! Kraus and Stinespring views.
//!
//! The Choi operator of `ψ: L(H_A) → L(H_B)` is the unnormalized
//! `J = Σ_{ij} |i⟩⟨j| ⊗ ψ(|i⟩⟨j|)` on `H_A ⊗ H_B` (input factor first), so
//! `Tr J = dim_in`. Stinespring isometries map `H_A → H_B ⊗ H_E` with the
//! output factor major.

mod constructors;

pub use constructors::{catalysis_reduction, trace_out_pair, CatalysisDims, TraceOutPair};

use crate::error::{mismatch, Error, Result};
use crate::matrix::{
    self, frobenius_distance, frobenius_norm, hermitian_deviation, hermitian_eigen, hermitian_part,
    identity, kron, partial_trace, permute_subsystems, ComplexMatrix, SubsystemDims, C64, EPS_HERM,
};

/// Positivity tolerance for Choi operators.
pub const EPS_PSD: f64 = 1e-9;
/// Trace-preservation tolerance (Frobenius norm of `Tr_B J - I`).
pub const EPS_TP: f64 = 1e-9;
/// Eigenvalues of a Choi operator at or below this are dropped when
/// extracting Kraus operators.
pub const EPS_RANK: f64 = 1e-9;
/// Two channels are equal when their Choi operators are this close in
/// Frobenius norm.
pub const EPS_EQ: f64 = 1e-8;

/// A completely positive trace-preserving map, stored by its Choi operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
}

impl Channel {
    /// Builds a channel from its Choi operator, checking CP and TP at the
    /// default tolerances.
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Result<Self> {
        Self::from_choi_with_tolerance(dim_in, dim_out, choi, EPS_PSD.max(EPS_TP))
    }

    /// Same as [`Channel::from_choi`] with an explicit tolerance for both the
    /// positivity and trace-preservation checks. Used for numerically obtained
    /// witnesses.
    pub fn from_choi_with_tolerance(
        dim_in: usize,
        dim_out: usize,
        choi: ComplexMatrix,
        tolerance: f64,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidParameter("channel dimensions must be >= 1".into()));
        }
        let n = dim_in * dim_out;
        if choi.nrows() != n || choi.ncols() != n {
            return Err(mismatch(format!(
                "Choi operator is {}x{}, expected {n}x{n} for {dim_in} -> {dim_out}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        let deviation = hermitian_deviation(&choi);
        if deviation > EPS_HERM.max(tolerance) * frobenius_norm(&choi).max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let channel = Self::from_choi_unchecked(dim_in, dim_out, hermitian_part(&choi));
        let min_eigenvalue = channel.min_choi_eigenvalue();
        if min_eigenvalue < -tolerance {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue,
                tolerance,
            });
        }
        let tp = channel.tp_deviation();
        if tp > tolerance {
            return Err(Error::NotTracePreserving {
                deviation: tp,
                tolerance,
            });
        }
        Ok(channel)
    }

    pub(crate) fn from_choi_unchecked(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Self {
        debug_assert_eq!(choi.nrows(), dim_in * dim_out);
        Self {
            dim_in,
            dim_out,
            choi,
        }
    }

    /// Builds the channel whose action on every operator is `map`, by
    /// evaluating it on the matrix units of the input space.
    pub fn from_linear_map<F>(dim_in: usize, dim_out: usize, map: F) -> Result<Self>
    where
        F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let mut choi = matrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let out = map(&matrix::unit(dim_in, i, j))?;
                if out.shape() != (dim_out, dim_out) {
                    return Err(mismatch(format!(
                        "map produced a {}x{} output, expected {dim_out}x{dim_out}",
                        out.nrows(),
                        out.ncols()
                    )));
                }
                choi.view_mut((i * dim_out, j * dim_out), (dim_out, dim_out))
                    .copy_from(&out);
            }
        }
        Self::from_choi(dim_in, dim_out, choi)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> ComplexMatrix {
        self.choi
    }

    /// Subsystem layout `[dim_in, dim_out]` of the Choi operator.
    pub fn choi_dims(&self) -> SubsystemDims {
        SubsystemDims::new(vec![self.dim_in, self.dim_out]).expect("channel dimensions are positive")
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        matrix::min_eigenvalue_unchecked(&self.choi)
    }

    /// Frobenius norm of `Tr_out J - I_in`.
    pub fn tp_deviation(&self) -> f64 {
        let marginal = partial_trace(&self.choi, &self.choi_dims(), &[0]).expect("shape checked");
        frobenius_distance(&marginal, &identity(self.dim_in))
    }

    /// Choi-operator Frobenius distance; infinite for mismatched dimensions.
    pub fn distance(&self, other: &Channel) -> f64 {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return f64::INFINITY;
        }
        frobenius_distance(&self.choi, &other.choi)
    }

    pub fn approx_eq(&self, other: &Channel, eps: f64) -> bool {
        self.distance(other) < eps
    }

    /// Evaluates `ψ(ρ) = Tr_A[(ρ^T ⊗ I_B) J]` for any square `ρ` on the input.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (da, db) = (self.dim_in, self.dim_out);
        if rho.shape() != (da, da) {
            return Err(mismatch(format!(
                "cannot apply a {da}-dimensional channel to a {}x{} operator",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = matrix::zeros(db, db);
        for i in 0..da {
            for j in 0..da {
                let r = rho[(i, j)];
                if r == C64::new(0.0, 0.0) {
                    continue;
                }
                let block = self.choi.view((i * db, j * db), (db, db));
                out += block * r;
            }
        }
        Ok(out)
    }

    /// The sequential composition `next ∘ self`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        compose_choi(self, next)
    }

    pub fn tensor(&self, other: &Channel) -> Channel {
        tensor(self, other)
    }

    /// Canonical Kraus operators from the spectral decomposition of the Choi
    /// operator.
    pub fn to_kraus(&self) -> Result<KrausSet> {
        kraus_from_choi(self, EPS_RANK)
    }
}

/// Choi operator of `θ ∘ ψ` given `J_ψ` on `A ⊗ B` and `J_θ` on `B ⊗ C`:
/// `J[(a,c),(a',c')] = Σ_{k,l} J_ψ[(a,k),(a',l)] J_θ[(k,c),(l,c')]`, which is
/// `Tr_B[(J_ψ^{T_B} ⊗ I_C)(I_A ⊗ J_θ)]` written out in indices.
pub fn link_product(
    j_psi: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    j_theta: &ComplexMatrix,
    dim_c: usize,
) -> ComplexMatrix {
    debug_assert_eq!(j_psi.nrows(), dim_a * dim_b);
    debug_assert_eq!(j_theta.nrows(), dim_b * dim_c);
    let mut out = matrix::zeros(dim_a * dim_c, dim_a * dim_c);
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            let mut block = out.view_mut((a * dim_c, a2 * dim_c), (dim_c, dim_c));
            for k in 0..dim_b {
                for l in 0..dim_b {
                    let w = j_psi[(a * dim_b + k, a2 * dim_b + l)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    block += j_theta.view((k * dim_c, l * dim_c), (dim_c, dim_c)) * w;
                }
            }
        }
    }
    out
}

/// Choi operator of `theta ∘ psi`.
pub fn compose_choi(psi: &Channel, theta: &Channel) -> Result<Channel> {
    if psi.dim_out != theta.dim_in {
        return Err(mismatch(format!(
            "cannot compose {}->{} with {}->{}",
            psi.dim_in, psi.dim_out, theta.dim_in, theta.dim_out
        )));
    }
    let choi = link_product(&psi.choi, psi.dim_in, psi.dim_out, &theta.choi, theta.dim_out);
    Ok(Channel::from_choi_unchecked(psi.dim_in, theta.dim_out, hermitian_part(&choi)))
}

/// Product channel `c1 ⊗ c2` from `A ⊗ A'` to `B ⊗ B'`.
pub fn tensor(c1: &Channel, c2: &Channel) -> Channel {
    let raw = kron(&c1.choi, &c2.choi);
    let dims = SubsystemDims::new(vec![c1.dim_in, c1.dim_out, c2.dim_in, c2.dim_out])
        .expect("channel dimensions are positive");
    let choi = permute_subsystems(&raw, &dims, &[0, 2, 1, 3]).expect("valid permutation");
    Channel::from_choi_unchecked(c1.dim_in * c2.dim_in, c1.dim_out * c2.dim_out, choi)
}

/// A Kraus decomposition `ψ(ρ) = Σ_k K_k ρ K_k^†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim_in: usize,
    dim_out: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Checks shapes and completeness `Σ K^†K = I` at [`EPS_TP`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(operators, EPS_TP)
    }

    pub fn with_tolerance(operators: Vec<ComplexMatrix>, tolerance: f64) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidParameter("a Kraus set needs at least one operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidParameter("Kraus operators must be non-empty".into()));
        }
        if let Some(k) = operators.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(mismatch(format!(
                "Kraus operators of differing shapes {dim_out}x{dim_in} and {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let set = Self {
            dim_in,
            dim_out,
            operators,
        };
        let deviation = set.completeness_deviation();
        if deviation > tolerance {
            return Err(Error::NotTracePreserving {
                deviation,
                tolerance,
            });
        }
        Ok(set)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Number of operators, i.e. the environment dimension of the induced
    /// Stinespring dilation.
    pub fn dim_env(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Frobenius norm of `Σ K^†K - I`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = matrix::zeros(self.dim_in, self.dim_in);
        for k in &self.operators {
            sum += k.adjoint() * k;
        }
        frobenius_distance(&sum, &identity(self.dim_in))
    }

    pub fn to_channel(&self) -> Channel {
        choi_from_kraus(self)
    }

    pub fn to_isometry(&self) -> StinespringIsometry {
        isometry_from_kraus(self)
    }

    /// Kraus operators `L_b = (⟨b| ⊗ I_E) V` of the complementary channel.
    pub fn complementary_kraus(&self) -> KrausSet {
        let env = self.dim_env();
        let ops = (0..self.dim_out)
            .map(|b| ComplexMatrix::from_fn(env, self.dim_in, |e, a| self.operators[e][(b, a)]))
            .collect();
        KrausSet {
            dim_in: self.dim_in,
            dim_out: env,
            operators: ops,
        }
    }

    pub fn complementary(&self) -> Channel {
        complementary(self)
    }
}

/// `J = Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`.
pub fn choi_from_kraus(k: &KrausSet) -> Channel {
    let (da, db) = (k.dim_in, k.dim_out);
    let n = da * db;
    let mut choi = matrix::zeros(n, n);
    for op in &k.operators {
        let v = ComplexMatrix::from_fn(n, 1, |idx, _| op[(idx % db, idx / db)]);
        choi += &v * v.adjoint();
    }
    Channel::from_choi_unchecked(da, db, hermitian_part(&choi))
}

/// Kraus operators `K_k = √λ_k · reshape(v_k)` from the eigenpairs of `J`
/// with `λ_k > eps_rank`, largest eigenvalue first.
pub fn kraus_from_choi(c: &Channel, eps_rank: f64) -> Result<KrausSet> {
    let eig = hermitian_eigen(&c.choi)?;
    let min = eig.min();
    if min < -EPS_PSD {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
            tolerance: EPS_PSD,
        });
    }
    let (da, db) = (c.dim_in, c.dim_out);
    let mut ops = Vec::new();
    let mut dropped = 0.0;
    for (idx, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda > eps_rank {
            let s = lambda.sqrt();
            let col = eig.vectors.column(idx);
            ops.push(ComplexMatrix::from_fn(db, da, |b, a| col[a * db + b] * s));
        } else {
            dropped += lambda.abs();
        }
    }
    if ops.is_empty() {
        return Err(Error::InvalidParameter("Choi operator has no eigenvalue above the rank threshold".into()));
    }
    KrausSet::with_tolerance(ops, EPS_TP.max(c.tp_deviation()) + dropped + EPS_TP)
}

/// A Stinespring isometry `V: H_A → H_B ⊗ H_E`, output factor major.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
    v: ComplexMatrix,
}

impl StinespringIsometry {
    pub fn new(v: ComplexMatrix, dim_out: usize, dim_env: usize) -> Result<Self> {
        if dim_out == 0 || dim_env == 0 || v.nrows() != dim_out * dim_env {
            return Err(mismatch(format!(
                "isometry has {} rows, expected {dim_out} x {dim_env}",
                v.nrows()
            )));
        }
        let deviation = frobenius_distance(&(v.adjoint() * &v), &identity(v.ncols()));
        if deviation > EPS_TP {
            return Err(Error::NotIsometry {
                deviation,
                tolerance: EPS_TP,
            });
        }
        Ok(Self {
            dim_in: v.ncols(),
            dim_out,
            dim_env,
            v,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn to_kraus(&self) -> KrausSet {
        kraus_from_isometry(self)
    }

    /// `ρ ↦ V ρ V^†`, the channel into the joint output-environment space.
    pub fn conjugation_channel(&self) -> Channel {
        let ops = vec![self.v.clone()];
        choi_from_kraus(&KrausSet {
            dim_in: self.dim_in,
            dim_out: self.dim_out * self.dim_env,
            operators: ops,
        })
    }
}

/// `V = Σ_i K_i ⊗ |i⟩`.
pub fn isometry_from_kraus(k: &KrausSet) -> StinespringIsometry {
    let env = k.dim_env();
    let v = ComplexMatrix::from_fn(k.dim_out * env, k.dim_in, |row, a| {
        k.operators[row % env][(row / env, a)]
    });
    StinespringIsometry {
        dim_in: k.dim_in,
        dim_out: k.dim_out,
        dim_env: env,
        v,
    }
}

/// `K_i = (I ⊗ ⟨i|) V`.
pub fn kraus_from_isometry(v: &StinespringIsometry) -> KrausSet {
    let ops = (0..v.dim_env)
        .map(|e| ComplexMatrix::from_fn(v.dim_out, v.dim_in, |b, a| v.v[(b * v.dim_env + e, a)]))
        .collect();
    KrausSet {
        dim_in: v.dim_in,
        dim_out: v.dim_out,
        operators: ops,
    }
}

/// Complementary channel `ψ^c(ρ) = Σ_{ij} Tr[K_i^† K_j ρ] |j⟩⟨i|` of this
/// particular Kraus representation.
pub fn complementary(k: &KrausSet) -> Channel {
    choi_from_kraus(&k.complementary_kraus())
}
