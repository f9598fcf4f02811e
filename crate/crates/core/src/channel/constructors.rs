use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{compose_choi, tensor, Channel, KrausSet};
use crate::error::{mismatch, Error, Result};
use crate::matrix::{self, frobenius_distance, identity, kron, partial_trace, ComplexMatrix, SubsystemDims, C64};

impl Channel {
    pub fn identity(d: usize) -> Channel {
        KrausSet::identity(d).to_channel()
    }

    /// `ρ ↦ Tr(ρ) I/d`.
    pub fn completely_depolarizing(d: usize) -> Channel {
        Channel::from_choi_unchecked(d, d, identity(d * d).scale(1.0 / d as f64))
    }

    /// `ρ ↦ Tr(ρ) σ` for a fixed state `σ`.
    pub fn replacement(dim_in: usize, sigma: &ComplexMatrix) -> Result<Channel> {
        if !sigma.is_square() {
            return Err(mismatch("replacement state must be square"));
        }
        Channel::from_choi(dim_in, sigma.nrows(), kron(&identity(dim_in), sigma))
    }

    /// `ρ ↦ ρ ⊗ σ`, appending an ancilla in state `σ`.
    pub fn append_state(dim_in: usize, sigma: &ComplexMatrix) -> Result<Channel> {
        let da = sigma.nrows();
        Channel::from_linear_map(dim_in, dim_in * da, |x| Ok(kron(x, sigma)))
    }

    /// Partial trace `⊗_k H_k → ⊗_{k ∈ keep} H_k` as a channel.
    pub fn partial_trace_map(dims: &SubsystemDims, keep: &[usize]) -> Result<Channel> {
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dim_out = kept.iter().map(|&k| dims.as_slice().get(k).copied().unwrap_or(0)).product();
        if kept.iter().any(|&k| k >= dims.len()) {
            return Err(mismatch(format!("subsystems {keep:?} out of range for {dims:?}")));
        }
        Channel::from_linear_map(dims.total(), dim_out, |x| partial_trace(x, dims, &kept))
    }
}

impl KrausSet {
    pub fn identity(d: usize) -> KrausSet {
        KrausSet {
            dim_in: d,
            dim_out: d,
            operators: vec![identity(d)],
        }
    }

    /// Single-operator set `{U}`; `U` must be unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<KrausSet> {
        if !u.is_square() {
            return Err(mismatch("unitary must be square"));
        }
        let dev = frobenius_distance(&(&u * u.adjoint()), &identity(u.nrows()));
        if dev > super::EPS_TP {
            return Err(Error::InvalidParameter(format!("matrix is not unitary (|UU^H - I| = {dev:.3e})")));
        }
        KrausSet::new(vec![u])
    }

    /// `{|b⟩⟨a|/√d}` for all `a, b`.
    pub fn completely_depolarizing(d: usize) -> KrausSet {
        let s = 1.0 / (d as f64).sqrt();
        let ops = (0..d)
            .flat_map(|b| (0..d).map(move |a| matrix::unit(d, b, a).scale(s)))
            .collect();
        KrausSet {
            dim_in: d,
            dim_out: d,
            operators: ops,
        }
    }

    /// Amplitude damping with decay probability `γ ∈ [0, 1]`:
    /// `K₀ = diag(1, √(1−γ))`, `K₁ = √γ |0⟩⟨1|`. Degradable for `γ ≤ 1/2`,
    /// anti-degradable for `γ ≥ 1/2`.
    pub fn amplitude_damping(gamma: f64) -> Result<KrausSet> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} outside [0, 1]")));
        }
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        KrausSet::new(vec![
            ComplexMatrix::from_row_slice(2, 2, &[r(1.0), z, z, r((1.0 - gamma).sqrt())]),
            ComplexMatrix::from_row_slice(2, 2, &[z, r(gamma.sqrt()), z, z]),
        ])
    }

    /// `{U K_i W}`: the channel `U ψ(W ρ W^†) U^†`.
    pub fn conjugated(&self, u: &ComplexMatrix, w: &ComplexMatrix) -> Result<KrausSet> {
        if u.shape() != (self.dim_out, self.dim_out) || w.shape() != (self.dim_in, self.dim_in) {
            return Err(mismatch("conjugating unitaries do not match the channel dimensions"));
        }
        KrausSet::new(self.operators.iter().map(|k| u * k * w).collect())
    }

    /// Two-operator qubit Kraus sets that coincide with their own complementary
    /// channel, parametrized by `α ∈ [0, π]`, `β ∈ [0, 2π]`.
    ///
    /// Family 1: `K₁ = diag(sin α, 1/√2)`, `K₂ = [[0, 1/√2], [e^{iβ} cos α, 0]]`.
    /// Family 2: `K₁ = diag(1, sin α/√2)`, `K₂ = [[0, sin α/√2], [0, e^{iβ} cos α]]`.
    /// `α = β = 0` in family 1 is the dephasing point.
    pub fn self_complementary_qubit(family: u8, alpha: f64, beta: f64) -> Result<KrausSet> {
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, pi]")));
        }
        if !(0.0..=2.0 * PI).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta = {beta} outside [0, 2pi]")));
        }
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        let phase = C64::from_polar(alpha.cos(), beta);
        let (k1, k2) = match family {
            1 => (
                [r(alpha.sin()), z, z, r(FRAC_1_SQRT_2)],
                [z, r(FRAC_1_SQRT_2), phase, z],
            ),
            2 => {
                let s = alpha.sin() * FRAC_1_SQRT_2;
                ([r(1.0), z, z, r(s)], [z, r(s), z, phase])
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "self-complementary family must be 1 or 2, got {other}"
                )))
            }
        };
        KrausSet::new(vec![
            ComplexMatrix::from_row_slice(2, 2, &k1),
            ComplexMatrix::from_row_slice(2, 2, &k2),
        ])
    }
}

/// A pair of compatible channels built from local channels on `H_B ⊗ H_C`,
/// with the product compatibilizer.
#[derive(Debug, Clone)]
pub struct TraceOutPair {
    /// `ψ̃ ∘ Tr_C`, from `B ⊗ C` to the output of `ψ̃`.
    pub psi: Channel,
    /// `φ̃ ∘ Tr_B`, from `B ⊗ C` to the output of `φ̃`.
    pub phi: Channel,
    /// `ψ̃ ⊗ φ̃`.
    pub compatibilizer: Channel,
}

pub fn trace_out_pair(psi_tilde: &Channel, phi_tilde: &Channel) -> Result<TraceOutPair> {
    let dims = SubsystemDims::new(vec![psi_tilde.dim_in(), phi_tilde.dim_in()])?;
    let keep_b = Channel::partial_trace_map(&dims, &[0])?;
    let keep_c = Channel::partial_trace_map(&dims, &[1])?;
    Ok(TraceOutPair {
        psi: compose_choi(&keep_b, psi_tilde)?,
        phi: compose_choi(&keep_c, phi_tilde)?,
        compatibilizer: tensor(psi_tilde, phi_tilde),
    })
}

/// Subsystem dimensions for reducing a compatibilizer of `ψ ⊗ χ` and
/// `φ ⊗ χ'` (input `A ⊗ A'`, output `B ⊗ B' ⊗ C ⊗ B''`) to one of `ψ`, `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalysisDims {
    pub a: usize,
    pub a_anc: usize,
    pub b: usize,
    pub b_anc: usize,
    pub c: usize,
    pub c_anc: usize,
}

/// `θ(ρ) = Tr_{B'B''}[θ̃(ρ ⊗ I_{A'}/d_{A'})]` as a channel `A → B ⊗ C`.
pub fn catalysis_reduction(theta: &Channel, dims: CatalysisDims) -> Result<Channel> {
    let CatalysisDims {
        a,
        a_anc,
        b,
        b_anc,
        c,
        c_anc,
    } = dims;
    if theta.dim_in() != a * a_anc || theta.dim_out() != b * b_anc * c * c_anc {
        return Err(mismatch(format!(
            "compatibilizer is {}->{}, expected {}->{}",
            theta.dim_in(),
            theta.dim_out(),
            a * a_anc,
            b * b_anc * c * c_anc
        )));
    }
    let maximally_mixed = identity(a_anc).scale(1.0 / a_anc as f64);
    let append = Channel::append_state(a, &maximally_mixed)?;
    let out_dims = SubsystemDims::new(vec![b, b_anc, c, c_anc])?;
    let discard = Channel::partial_trace_map(&out_dims, &[0, 2])?;
    compose_choi(&compose_choi(&append, theta)?, &discard)
}
