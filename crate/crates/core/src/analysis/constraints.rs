//! Assembly of affine constraint systems in Choi coordinates.
//!
//! Every decision problem is a list of requirements `L(X) = T`, where `L` is
//! a Hermiticity-preserving linear map evaluated with ordinary channel and
//! matrix operations. The builder tabulates each `L` on an orthonormal
//! Hermitian basis, which yields the rows of the real constraint matrix.
//! Optionally the variable is restricted to `X = W Y W^†` for an isometry `W`,
//! i.e. to operators supported on a known subspace.

use nalgebra::{DMatrix, DVector};

use crate::channel::{link_product, Channel, EPS_RANK};
use crate::error::{mismatch, Result};
use crate::feasibility::AffineConstraintSet;
use crate::matrix::{
    self, devectorize_hermitian, hermitian_eigen, identity, kron, permute_subsystems, vectorize_hermitian,
    ComplexMatrix, SubsystemDims,
};

type LinearMap<'a> = Box<dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix> + 'a>;

pub struct ConstraintBuilder<'a> {
    full_side: usize,
    support: Option<ComplexMatrix>,
    requirements: Vec<(LinearMap<'a>, ComplexMatrix)>,
}

impl<'a> ConstraintBuilder<'a> {
    pub fn new(full_side: usize) -> Self {
        Self {
            full_side,
            support: None,
            requirements: Vec::new(),
        }
    }

    /// Restricts the variable to operators supported on the column span of
    /// `w` (orthonormal columns).
    pub fn restrict_support(mut self, w: ComplexMatrix) -> Result<Self> {
        if w.nrows() != self.full_side || w.ncols() == 0 {
            return Err(mismatch(format!(
                "support basis is {}x{}, variable side is {}",
                w.nrows(),
                w.ncols(),
                self.full_side
            )));
        }
        self.support = Some(w);
        Ok(self)
    }

    /// Side of the reduced variable `Y`.
    pub fn side(&self) -> usize {
        self.support.as_ref().map_or(self.full_side, |w| w.ncols())
    }

    pub fn full_side(&self) -> usize {
        self.full_side
    }

    /// Maps a reduced variable back to the full space.
    pub fn lift(&self, y: &ComplexMatrix) -> ComplexMatrix {
        match &self.support {
            Some(w) => w * y * w.adjoint(),
            None => y.clone(),
        }
    }

    pub fn require<F>(&mut self, map: F, target: ComplexMatrix)
    where
        F: Fn(&ComplexMatrix) -> Result<ComplexMatrix> + 'a,
    {
        self.requirements.push((Box::new(map), target));
    }

    pub fn build(&self) -> Result<AffineConstraintSet> {
        let side = self.side();
        let n = side * side;
        let rows: usize = self.requirements.iter().map(|(_, t)| t.nrows() * t.nrows()).sum();
        let mut m = DMatrix::zeros(rows, n);
        let mut rhs = DVector::zeros(rows);
        let mut basis = DVector::zeros(n);
        let mut offset = 0;
        for (map, target) in &self.requirements {
            let r = target.nrows() * target.nrows();
            for k in 0..n {
                basis[k] = 1.0;
                let x = self.lift(&devectorize_hermitian(&basis, side)?);
                basis[k] = 0.0;
                let image = map(&x)?;
                if image.shape() != target.shape() {
                    return Err(mismatch(format!(
                        "constraint map yields {}x{}, target is {}x{}",
                        image.nrows(),
                        image.ncols(),
                        target.nrows(),
                        target.ncols()
                    )));
                }
                m.view_mut((offset, k), (r, 1)).copy_from(&vectorize_hermitian(&image));
            }
            rhs.rows_mut(offset, r).copy_from(&vectorize_hermitian(target));
            offset += r;
        }
        AffineConstraintSet::new(side, m, rhs)
    }
}

/// Requirements for a compatibilizer of `psi: A → B` and `phi: A → C`: the
/// variable is `J_θ` on `A ⊗ B ⊗ C` with `Tr_C J_θ = J_ψ` and
/// `Tr_B J_θ = J_φ`.
pub fn compatibility_builder<'a>(psi: &'a Channel, phi: &'a Channel, reduce: bool) -> Result<ConstraintBuilder<'a>> {
    if psi.dim_in() != phi.dim_in() {
        return Err(mismatch(format!(
            "compatibility needs a common input, got {} and {}",
            psi.dim_in(),
            phi.dim_in()
        )));
    }
    let (da, db, dc) = (psi.dim_in(), psi.dim_out(), phi.dim_out());
    let dims = SubsystemDims::new(vec![da, db, dc])?;
    let mut builder = ConstraintBuilder::new(da * db * dc);
    if reduce {
        let p_psi = kron(&range_projector(psi.choi())?, &identity(dc));
        let p_phi_acb = kron(&range_projector(phi.choi())?, &identity(db));
        let acb = SubsystemDims::new(vec![da, dc, db])?;
        let p_phi = permute_subsystems(&p_phi_acb, &acb, &[0, 2, 1])?;
        if let Some(w) = intersection_basis(&[p_psi, p_phi])? {
            builder = builder.restrict_support(w)?;
        }
    }
    let dims_b = dims.clone();
    builder.require(move |x| matrix::partial_trace(x, &dims_b, &[0, 1]), psi.choi().clone());
    builder.require(move |x| matrix::partial_trace(x, &dims, &[0, 2]), phi.choi().clone());
    Ok(builder)
}

/// Requirements for a quotient `θ: B → C` with `θ ∘ ψ = φ`: the variable is
/// `J_θ` on `B ⊗ C` with the link-product constraint and `Tr_C J_θ = I_B`.
pub fn divisibility_builder<'a>(psi: &'a Channel, phi: &'a Channel, reduce: bool) -> Result<ConstraintBuilder<'a>> {
    if psi.dim_in() != phi.dim_in() {
        return Err(mismatch(format!(
            "divisibility needs a common input, got {} and {}",
            psi.dim_in(),
            phi.dim_in()
        )));
    }
    let (da, db, dc) = (psi.dim_in(), psi.dim_out(), phi.dim_out());
    let mut builder = ConstraintBuilder::new(db * dc);
    if reduce {
        if let Some(w) = quotient_support(psi, phi)? {
            builder = builder.restrict_support(w)?;
        }
    }
    let dims = SubsystemDims::new(vec![db, dc])?;
    builder.require(move |x| Ok(link_product(psi.choi(), da, db, x, dc)), phi.choi().clone());
    builder.require(move |x| matrix::partial_trace(x, &dims, &[0]), identity(db));
    Ok(builder)
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above
/// [`EPS_RANK`].
fn range_projector(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(x)?;
    Ok(eig.reconstruct(|v| if v > EPS_RANK { 1.0 } else { 0.0 }))
}

/// Orthonormal basis of the intersection of the ranges of the given
/// projectors, or `None` when that is the whole space.
fn intersection_basis(projectors: &[ComplexMatrix]) -> Result<Option<ComplexMatrix>> {
    let n = projectors[0].nrows();
    let mut defect = matrix::zeros(n, n);
    for p in projectors {
        defect += identity(n) - p;
    }
    null_space(&defect)
}

/// Columns spanning the kernel of a PSD matrix, or `None` if it is trivial
/// enough that no reduction happens (kernel is everything).
fn null_space(x: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
    let n = x.nrows();
    let eig = hermitian_eigen(x)?;
    let scale = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    let kernel: Vec<usize> = (0..n).filter(|&k| eig.values[k] <= 1e-8 * scale).collect();
    if kernel.len() == n || kernel.is_empty() {
        // an empty support means the problem is infeasible; leave the
        // variable unrestricted so the solver reports it
        return Ok(None);
    }
    let mut w = matrix::zeros(n, kernel.len());
    for (col, &k) in kernel.iter().enumerate() {
        w.set_column(col, &eig.vectors.column(k));
    }
    Ok(Some(w))
}

/// Subspace of `B ⊗ C` that any quotient Choi operator must live in: for
/// every `v` in the kernel of `J_φ` and every eigenvector `u` of `J_ψ`, the
/// vector `w_{bc} = Σ_a v_{ac} conj(u_{ab})` is annihilated by `J_θ`.
fn quotient_support(psi: &Channel, phi: &Channel) -> Result<Option<ComplexMatrix>> {
    let (da, db, dc) = (psi.dim_in(), psi.dim_out(), phi.dim_out());
    let phi_eig = hermitian_eigen(phi.choi())?;
    let psi_eig = hermitian_eigen(psi.choi())?;
    let n = db * dc;
    let mut excluded = matrix::zeros(n, n);
    let mut any = false;
    for (kv, &lv) in phi_eig.values.iter().enumerate() {
        if lv > EPS_RANK {
            continue;
        }
        let v = phi_eig.vectors.column(kv);
        for (ku, &lu) in psi_eig.values.iter().enumerate() {
            if lu <= EPS_RANK {
                continue;
            }
            let u = psi_eig.vectors.column(ku);
            let w = ComplexMatrix::from_fn(n, 1, |idx, _| {
                let (b, c) = (idx / dc, idx % dc);
                (0..da).map(|a| v[a * dc + c] * u[a * db + b].conj()).sum()
            });
            excluded += &w * w.adjoint();
            any = true;
        }
    }
    if !any {
        return Ok(None);
    }
    null_space(&excluded)
}
