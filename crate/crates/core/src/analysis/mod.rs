//! Decision procedures for compatibility, divisibility and degradability, and
//! the constructive pipelines that turn one kind of witness into another.
//!
//! Each check reduces to [`feasibility::solve`] on a problem assembled by
//! [`constraints`]. A `Feasible` verdict always carries a witness channel that
//! has been re-verified against its defining equations with [`Channel`]
//! operations; a witness that fails re-verification downgrades the verdict to
//! `IterationLimit`.

pub mod constraints;
mod theorems;

pub use theorems::{
    antidegrading_map_from_compat_and_div, check_family_divisibility, compatibilizer_from_postprocessing,
    compatibilizer_via_antidegradability, postprocessing_from_compatibilizer, quotient_via_degradability,
    swap_outputs, verify_no_catalysis, CatalysisReport, FamilyReport, PostprocessingExtraction,
};

use serde::Serialize;

use crate::channel::{compose_choi, Channel, KrausSet, EPS_EQ};
use crate::error::{mismatch, Result};
use crate::feasibility::{self, FeasibilityReport, FeasibilityStatus, SolverConfig};
use crate::matrix::{frobenius_distance, hermitian_part, partial_trace, unit, SubsystemDims};
use constraints::ConstraintBuilder;

/// Solver outcome without the iterate itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSummary {
    pub status: FeasibilityStatus,
    pub residual_affine: f64,
    pub residual_psd: f64,
    pub iterations: usize,
    /// Side of the matrix variable after support reduction.
    pub variable_side: usize,
}

#[derive(Debug, Clone)]
pub struct CompatReport {
    pub status: FeasibilityStatus,
    /// `θ: A → B ⊗ C`; present iff `status` is `Feasible`.
    pub compatibilizer: Option<Channel>,
    /// Largest `‖Tr_C θ(E_ij) − ψ(E_ij)‖_F` over matrix units.
    pub residual_b: Option<f64>,
    /// Largest `‖Tr_B θ(E_ij) − φ(E_ij)‖_F` over matrix units.
    pub residual_c: Option<f64>,
    pub solver: SolverSummary,
}

impl CompatReport {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

#[derive(Debug, Clone)]
pub struct DivReport {
    pub status: FeasibilityStatus,
    /// `θ: B → C` with `θ ∘ ψ = φ`; present iff `status` is `Feasible`.
    pub quotient: Option<Channel>,
    /// `‖J_{θ∘ψ} − J_φ‖_F`.
    pub composition_residual: Option<f64>,
    pub solver: SolverSummary,
}

impl DivReport {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegradabilityKind {
    Degradable,
    AntiDegradable,
    SelfDegradable,
}

#[derive(Debug, Clone)]
pub struct DegradabilityReport {
    pub kind: DegradabilityKind,
    pub status: FeasibilityStatus,
    /// `λ_{E|B}` (degradable) or `λ_{B|E}` (anti-degradable); for
    /// self-degradable channels the identity on the output.
    pub degrading_map: Option<Channel>,
    /// Residual of the defining composition when a map is present.
    pub residual: Option<f64>,
    /// `‖J_ψ − J_{ψ^c}‖_F` for the self-degradable kind; infinite when the
    /// environment and output dimensions differ.
    pub self_distance: Option<f64>,
    /// Environment dimension of the Kraus representation used.
    pub env_dim: usize,
    pub solver: Option<SolverSummary>,
}

impl DegradabilityReport {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Tolerance for accepting solver iterates as channels and for re-verifying
/// their defining equations.
pub(crate) fn witness_tolerance(config: &SolverConfig) -> f64 {
    10.0 * config.eps_feas
}

fn summarize(report: &FeasibilityReport, side: usize, config: &SolverConfig) -> SolverSummary {
    let mut status = report.status;
    let combined = report.combined_residual();
    if status == FeasibilityStatus::NotFeasibleAtTolerance && combined < 10.0 * config.eps_feas {
        status = FeasibilityStatus::IterationLimit;
    }
    SolverSummary {
        status,
        residual_affine: report.residual_affine,
        residual_psd: report.residual_psd,
        iterations: report.iterations,
        variable_side: side,
    }
}

/// Solves the assembled problem and lifts a feasible iterate into a channel.
fn solve_for_channel(
    builder: &ConstraintBuilder<'_>,
    dim_in: usize,
    dim_out: usize,
    config: &SolverConfig,
) -> Result<(SolverSummary, Option<Channel>)> {
    let set = builder.build()?;
    let report = feasibility::solve(&set, config)?;
    let summary = summarize(&report, builder.side(), config);
    let witness = match &report.solution {
        Some(y) => {
            let choi = hermitian_part(&builder.lift(y));
            Channel::from_choi_with_tolerance(dim_in, dim_out, choi, witness_tolerance(config)).ok()
        }
        None => None,
    };
    Ok((summary, witness))
}

/// Largest Frobenius deviation between two linear maps over the matrix units
/// of a `d`-dimensional input.
pub(crate) fn basis_deviation<F, G>(d: usize, f: F, g: G) -> Result<f64>
where
    F: Fn(&crate::ComplexMatrix) -> Result<crate::ComplexMatrix>,
    G: Fn(&crate::ComplexMatrix) -> Result<crate::ComplexMatrix>,
{
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = unit(d, i, j);
            worst = worst.max(frobenius_distance(&f(&e)?, &g(&e)?));
        }
    }
    Ok(worst)
}

/// Marginal residuals of a candidate compatibilizer of `psi` and `phi`,
/// evaluated by applying it to matrix units.
pub fn compatibilizer_residuals(theta: &Channel, psi: &Channel, phi: &Channel) -> Result<(f64, f64)> {
    let (db, dc) = (psi.dim_out(), phi.dim_out());
    if theta.dim_in() != psi.dim_in() || theta.dim_out() != db * dc || psi.dim_in() != phi.dim_in() {
        return Err(mismatch(format!(
            "compatibilizer {}->{} does not match marginals {}->{} and {}->{}",
            theta.dim_in(),
            theta.dim_out(),
            psi.dim_in(),
            db,
            phi.dim_in(),
            dc
        )));
    }
    let dims = SubsystemDims::new(vec![db, dc])?;
    let rb = basis_deviation(psi.dim_in(), |e| partial_trace(&theta.apply(e)?, &dims, &[0]), |e| psi.apply(e))?;
    let rc = basis_deviation(psi.dim_in(), |e| partial_trace(&theta.apply(e)?, &dims, &[1]), |e| phi.apply(e))?;
    Ok((rb, rc))
}

pub fn check_compatibility(psi: &Channel, phi: &Channel, config: &SolverConfig) -> Result<CompatReport> {
    config.validate()?;
    let builder = constraints::compatibility_builder(psi, phi, true)?;
    let (mut solver, witness) = solve_for_channel(&builder, psi.dim_in(), psi.dim_out() * phi.dim_out(), config)?;
    let tol = witness_tolerance(config);
    let mut report = CompatReport {
        status: solver.status,
        compatibilizer: None,
        residual_b: None,
        residual_c: None,
        solver,
    };
    if solver.status == FeasibilityStatus::Feasible {
        let verified = match witness {
            Some(theta) => {
                let (rb, rc) = compatibilizer_residuals(&theta, psi, phi)?;
                (rb < tol && rc < tol).then_some((theta, rb, rc))
            }
            None => None,
        };
        match verified {
            Some((theta, rb, rc)) => {
                report.compatibilizer = Some(theta);
                report.residual_b = Some(rb);
                report.residual_c = Some(rc);
            }
            None => {
                solver.status = FeasibilityStatus::IterationLimit;
                report.status = solver.status;
                report.solver = solver;
            }
        }
    }
    Ok(report)
}

pub fn check_divisibility(psi: &Channel, phi: &Channel, config: &SolverConfig) -> Result<DivReport> {
    config.validate()?;
    let builder = constraints::divisibility_builder(psi, phi, true)?;
    let (mut solver, witness) = solve_for_channel(&builder, psi.dim_out(), phi.dim_out(), config)?;
    let tol = witness_tolerance(config);
    let mut report = DivReport {
        status: solver.status,
        quotient: None,
        composition_residual: None,
        solver,
    };
    if solver.status == FeasibilityStatus::Feasible {
        let verified = match witness {
            Some(theta) => {
                let residual = compose_choi(psi, &theta)?.distance(phi);
                (residual < tol).then_some((theta, residual))
            }
            None => None,
        };
        match verified {
            Some((theta, residual)) => {
                report.quotient = Some(theta);
                report.composition_residual = Some(residual);
            }
            None => {
                solver.status = FeasibilityStatus::IterationLimit;
                report.status = solver.status;
                report.solver = solver;
            }
        }
    }
    Ok(report)
}

fn ensure_represents(psi: &Channel, kraus: &KrausSet) -> Result<()> {
    let d = psi.distance(&kraus.to_channel());
    if d > EPS_EQ {
        return Err(mismatch(format!(
            "Kraus set does not represent the channel (Choi distance {d:.3e})"
        )));
    }
    Ok(())
}

fn degradability_report(kind: DegradabilityKind, env_dim: usize, div: DivReport) -> DegradabilityReport {
    DegradabilityReport {
        kind,
        status: div.status,
        degrading_map: div.quotient,
        residual: div.composition_residual,
        self_distance: None,
        env_dim,
        solver: Some(div.solver),
    }
}

/// Whether some channel `λ_{E|B}` satisfies `λ ∘ ψ = ψ^c`, with `ψ^c` taken
/// from `kraus`.
pub fn check_degradable(psi: &Channel, kraus: &KrausSet, config: &SolverConfig) -> Result<DegradabilityReport> {
    ensure_represents(psi, kraus)?;
    let comp = kraus.complementary();
    let div = check_divisibility(psi, &comp, config)?;
    Ok(degradability_report(DegradabilityKind::Degradable, kraus.dim_env(), div))
}

/// Whether some channel `λ_{B|E}` satisfies `λ ∘ ψ^c = ψ`.
pub fn check_antidegradable(psi: &Channel, kraus: &KrausSet, config: &SolverConfig) -> Result<DegradabilityReport> {
    ensure_represents(psi, kraus)?;
    let comp = kraus.complementary();
    let div = check_divisibility(&comp, psi, config)?;
    Ok(degradability_report(DegradabilityKind::AntiDegradable, kraus.dim_env(), div))
}

/// Compares `ψ` with `ψ^c` for this particular Kraus representation; the
/// verdict is `Feasible` iff the Choi distance is below [`EPS_EQ`].
pub fn check_self_degradable(kraus: &KrausSet) -> DegradabilityReport {
    let env_dim = kraus.dim_env();
    let mut report = DegradabilityReport {
        kind: DegradabilityKind::SelfDegradable,
        status: FeasibilityStatus::NotFeasibleAtTolerance,
        degrading_map: None,
        residual: None,
        self_distance: None,
        env_dim,
        solver: None,
    };
    // infinite when the output and environment dimensions differ
    let distance = frobenius_distance(kraus.to_channel().choi(), kraus.complementary().choi());
    report.self_distance = Some(distance);
    if distance < EPS_EQ {
        report.status = FeasibilityStatus::Feasible;
        report.degrading_map = Some(Channel::identity(env_dim));
        report.residual = Some(distance);
    }
    report
}
