use crate::channel::{
    catalysis_reduction, compose_choi, isometry_from_kraus, tensor, CatalysisDims, Channel, KrausSet,
};
use crate::error::{mismatch, Error, Result};
use crate::feasibility::SolverConfig;
use crate::matrix::{project_psd, SubsystemDims};

use super::{check_compatibility, check_divisibility, compatibilizer_residuals, CompatReport, DivReport};

/// Marginals of a reconstructed compatibilizer must match to this bound.
const CONSTRUCTION_TOLERANCE: f64 = 1e-9;

/// A compatibilizer rewritten as a dilation of its first marginal followed by
/// a post-processing of the enlarged environment.
#[derive(Debug, Clone)]
pub struct PostprocessingExtraction {
    /// `ρ ↦ Tr_B[V ρ V^†]`, from `A` to `C ⊗ E`.
    pub psi_c_enlarged: Channel,
    /// `Tr_E`, from `C ⊗ E` to `C`.
    pub theta_ce: Channel,
    pub env_dim: usize,
    /// Largest basis deviation of `θ ∘ ψ^c` from the `C` marginal and of
    /// `Tr_{CE}[V·V^†]` from the `B` marginal.
    pub residual: f64,
}

/// Given a compatibilizer `θ: A → B ⊗ C`, exhibits its `C` marginal as a
/// post-processing of a complementary channel of its `B` marginal.
pub fn postprocessing_from_compatibilizer(
    compatibilizer: &Channel,
    dim_b: usize,
    dim_c: usize,
) -> Result<PostprocessingExtraction> {
    if compatibilizer.dim_out() != dim_b * dim_c {
        return Err(mismatch(format!(
            "compatibilizer output {} is not {dim_b} x {dim_c}",
            compatibilizer.dim_out()
        )));
    }
    // solver witnesses are PSD only up to the feasibility tolerance; the
    // dilation uses the PSD part and the residual absorbs the dropped part
    let psd_part = Channel::from_choi_unchecked(
        compatibilizer.dim_in(),
        compatibilizer.dim_out(),
        project_psd(compatibilizer.choi())?,
    );
    let kraus = psd_part.to_kraus()?;
    let env = kraus.dim_env();
    let dilation = isometry_from_kraus(&kraus).conjugation_channel();
    let bce = SubsystemDims::new(vec![dim_b, dim_c, env])?;
    let psi_c_enlarged = compose_choi(&dilation, &Channel::partial_trace_map(&bce, &[1, 2])?)?;
    let theta_ce = Channel::partial_trace_map(&SubsystemDims::new(vec![dim_c, env])?, &[0])?;
    let psi_b = compose_choi(&dilation, &Channel::partial_trace_map(&bce, &[0])?)?;
    let phi = compose_choi(&psi_c_enlarged, &theta_ce)?;

    let bc = SubsystemDims::new(vec![dim_b, dim_c])?;
    let marginal_b = compose_choi(compatibilizer, &Channel::partial_trace_map(&bc, &[0])?)?;
    let marginal_c = compose_choi(compatibilizer, &Channel::partial_trace_map(&bc, &[1])?)?;
    let d = compatibilizer.dim_in();
    let residual = super::basis_deviation(d, |e| phi.apply(e), |e| marginal_c.apply(e))?
        .max(super::basis_deviation(d, |e| psi_b.apply(e), |e| marginal_b.apply(e))?);
    Ok(PostprocessingExtraction {
        psi_c_enlarged,
        theta_ce,
        env_dim: dim_c * env,
        residual,
    })
}

/// `ρ ↦ (id_B ⊗ θ)(V ρ V^†)` for the Stinespring isometry `V` of
/// `psi_kraus`. Its marginals are `ψ` and `θ ∘ ψ^c`.
pub fn compatibilizer_from_postprocessing(psi_kraus: &KrausSet, theta: &Channel) -> Result<Channel> {
    if theta.dim_in() != psi_kraus.dim_env() {
        return Err(mismatch(format!(
            "post-processing input {} differs from environment dimension {}",
            theta.dim_in(),
            psi_kraus.dim_env()
        )));
    }
    let dilation = isometry_from_kraus(psi_kraus).conjugation_channel();
    let local = tensor(&Channel::identity(psi_kraus.dim_out()), theta);
    let compatibilizer = compose_choi(&dilation, &local)?;

    let psi = psi_kraus.to_channel();
    let phi = compose_choi(&psi_kraus.complementary(), theta)?;
    let (rb, rc) = compatibilizer_residuals(&compatibilizer, &psi, &phi)?;
    if rb.max(rc) > CONSTRUCTION_TOLERANCE {
        return Err(Error::InvalidWitness(format!(
            "constructed compatibilizer misses its marginals by {:.3e}",
            rb.max(rc)
        )));
    }
    Ok(compatibilizer)
}

/// Swaps the two output factors of a channel into `B ⊗ C`.
pub fn swap_outputs(theta: &Channel, dim_b: usize, dim_c: usize) -> Result<Channel> {
    if theta.dim_out() != dim_b * dim_c {
        return Err(mismatch(format!("output {} is not {dim_b} x {dim_c}", theta.dim_out())));
    }
    let dims = SubsystemDims::new(vec![dim_b, dim_c])?;
    let swap = Channel::from_linear_map(dim_b * dim_c, dim_b * dim_c, |x| {
        crate::matrix::permute_subsystems(x, &dims, &[1, 0])
    })?;
    compose_choi(theta, &swap)
}

fn check_witness(lhs: &Channel, rhs: &Channel, tolerance: f64, what: &str) -> Result<()> {
    let d = lhs.distance(rhs);
    if d > tolerance {
        return Err(Error::InvalidWitness(format!("{what} fails by {d:.3e} (tolerance {tolerance:.1e})")));
    }
    Ok(())
}

/// For a degradable `ψ` (`λ ∘ ψ = ψ^c`) and `φ = θ_{C|E} ∘ ψ^c`, returns the
/// quotient `θ_{C|E} ∘ λ` of `φ` by `ψ`.
pub fn quotient_via_degradability(
    psi_kraus: &KrausSet,
    degrading: &Channel,
    theta_ce: &Channel,
    tolerance: f64,
) -> Result<Channel> {
    let psi = psi_kraus.to_channel();
    check_witness(
        &compose_choi(&psi, degrading)?,
        &psi_kraus.complementary(),
        tolerance,
        "degradability witness",
    )?;
    compose_choi(degrading, theta_ce)
}

/// For an anti-degradable `ψ` (`λ ∘ ψ^c = ψ`) and `φ = θ_{C|B} ∘ ψ`, returns
/// a compatibilizer of `ψ` and `φ`.
pub fn compatibilizer_via_antidegradability(
    psi_kraus: &KrausSet,
    antidegrading: &Channel,
    theta_cb: &Channel,
    tolerance: f64,
) -> Result<Channel> {
    check_witness(
        &compose_choi(&psi_kraus.complementary(), antidegrading)?,
        &psi_kraus.to_channel(),
        tolerance,
        "anti-degradability witness",
    )?;
    let theta_ce = compose_choi(antidegrading, theta_cb)?;
    compatibilizer_from_postprocessing(psi_kraus, &theta_ce)
}

/// `θ_{C|B} ∘ θ_{B|E}`: the anti-degrading map of `φ` when `φ = θ_{C|B} ∘ ψ`
/// and `ψ = θ_{B|E} ∘ φ^c`.
pub fn antidegrading_map_from_compat_and_div(theta_cb: &Channel, theta_be: &Channel) -> Result<Channel> {
    compose_choi(theta_be, theta_cb)
}

#[derive(Debug, Clone)]
pub struct FamilyReport {
    /// One report per consecutive pair `(ψ_k, ψ_{k+1})`.
    pub steps: Vec<DivReport>,
}

impl FamilyReport {
    pub fn is_divisible(&self) -> bool {
        self.steps.iter().all(DivReport::is_feasible)
    }
}

/// Checks that every member of the family divides the next one.
pub fn check_family_divisibility(family: &[Channel], config: &SolverConfig) -> Result<FamilyReport> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    if let Some(bad) = family.iter().find(|c| c.dim_in() != first.dim_in()) {
        return Err(mismatch(format!(
            "family members must share the input dimension {}, found {}",
            first.dim_in(),
            bad.dim_in()
        )));
    }
    let steps = family
        .windows(2)
        .map(|w| check_divisibility(&w[0], &w[1], config))
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyReport { steps })
}

#[derive(Debug, Clone)]
pub struct CatalysisReport {
    /// Compatibility of `ψ ⊗ χ` and `φ ⊗ χ`.
    pub tensored: CompatReport,
    /// Compatibilizer of `ψ` and `φ` obtained by reduction, when the
    /// tensored pair is compatible.
    pub reduced: Option<Channel>,
    pub residual_b: Option<f64>,
    pub residual_c: Option<f64>,
}

/// Decides compatibility of `ψ ⊗ χ` and `φ ⊗ χ` and, if it holds, reduces the
/// compatibilizer to one of `ψ` and `φ`.
pub fn verify_no_catalysis(psi: &Channel, phi: &Channel, chi: &Channel, config: &SolverConfig) -> Result<CatalysisReport> {
    if psi.dim_in() != phi.dim_in() {
        return Err(mismatch(format!(
            "channels have inputs {} and {}",
            psi.dim_in(),
            phi.dim_in()
        )));
    }
    let psi_chi = tensor(psi, chi);
    let phi_chi = tensor(phi, chi);
    let tensored = check_compatibility(&psi_chi, &phi_chi, config)?;
    let mut report = CatalysisReport {
        tensored,
        reduced: None,
        residual_b: None,
        residual_c: None,
    };
    if let Some(theta) = &report.tensored.compatibilizer {
        let dims = CatalysisDims {
            a: psi.dim_in(),
            a_anc: chi.dim_in(),
            b: psi.dim_out(),
            b_anc: chi.dim_out(),
            c: phi.dim_out(),
            c_anc: chi.dim_out(),
        };
        let reduced = catalysis_reduction(theta, dims)?;
        let (rb, rc) = compatibilizer_residuals(&reduced, psi, phi)?;
        report.reduced = Some(reduced);
        report.residual_b = Some(rb);
        report.residual_c = Some(rc);
    }
    Ok(report)
}
