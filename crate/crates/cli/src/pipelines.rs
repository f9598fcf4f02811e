use std::path::PathBuf;

use qcompat::analysis::{
    antidegrading_map_from_compat_and_div, check_antidegradable, check_compatibility, check_degradable,
    check_divisibility, check_family_divisibility, check_self_degradable, compatibilizer_from_postprocessing,
    compatibilizer_residuals, compatibilizer_via_antidegradability, postprocessing_from_compatibilizer,
    quotient_via_degradability, swap_outputs, verify_no_catalysis, CompatReport, DivReport,
};
use qcompat::channel::compose_choi;
use qcompat::format::{Report, ReportStatus, Residuals, Step};
use qcompat::random::{random_full_rank_channel, rng_from_seed, SeededRng};
use qcompat::{Channel, Error, KrausSet, Result, SolverConfig};

use crate::commands::{config_echo, kraus_of, load, solver_config, witness};
use crate::{GlobalOpts, Pipeline, VerifyArgs};

struct Run {
    steps: Vec<Step>,
    witness: Option<(Channel, &'static str)>,
    warnings: Vec<String>,
}

impl Run {
    fn new() -> Self {
        Self {
            steps: Vec::new(),
            witness: None,
            warnings: Vec::new(),
        }
    }

    fn compat(&mut self, name: &str, rep: &CompatReport) {
        let residual = rep.residual_b.zip(rep.residual_c).map(|(b, c)| b.max(c));
        self.steps
            .push(Step::new(name, rep.status.into(), residual, Some(rep.solver.iterations)));
    }

    fn div(&mut self, name: &str, rep: &DivReport) {
        self.steps.push(Step::new(
            name,
            rep.status.into(),
            rep.composition_residual,
            Some(rep.solver.iterations),
        ));
    }

    /// A constructive step: passes when its residual is below `tolerance`.
    fn construction(&mut self, name: &str, residual: f64, tolerance: f64) {
        let status = if residual < tolerance {
            ReportStatus::Feasible
        } else {
            ReportStatus::NotFeasibleAtTolerance
        };
        self.steps.push(Step::new(name, status, Some(residual), None));
    }

    fn ok(&self) -> bool {
        self.steps.iter().all(|s| s.status == ReportStatus::Feasible)
    }
}

fn one_input(args: &VerifyArgs) -> Result<&PathBuf> {
    match args.inputs.as_slice() {
        [p] => Ok(p),
        other => Err(Error::InvalidParameter(format!(
            "{:?} takes exactly one channel file, got {}",
            args.pipeline,
            other.len()
        ))),
    }
}

/// The post-processing channel from `--theta`, or a random one of full
/// Kraus rank.
fn post_processing(args: &VerifyArgs, dim_in: usize, rng: &mut SeededRng) -> Result<Channel> {
    let theta = match &args.theta {
        Some(path) => load(path)?.channel(),
        None => random_full_rank_channel(dim_in, args.dim_c, rng)?,
    };
    if theta.dim_in() != dim_in {
        return Err(Error::DimensionMismatch(format!(
            "post-processing channel has input {}, expected {dim_in}",
            theta.dim_in()
        )));
    }
    Ok(theta)
}

pub fn verify(args: &VerifyArgs, global: &GlobalOpts) -> Result<Report> {
    let config = solver_config(global)?;
    let seed = global.seed.unwrap_or(0);
    let mut rng = rng_from_seed(seed);
    let tol = 10.0 * config.eps_feas;
    let mut run = Run::new();
    match args.pipeline {
        Pipeline::Thm1 => thm1(args, &config, &mut rng, &mut run)?,
        Pipeline::Thm2i => thm2i(args, &config, &mut rng, tol, &mut run)?,
        Pipeline::Thm2ii => thm2ii(args, &config, &mut rng, tol, &mut run)?,
        Pipeline::Corollary => corollary(args, &config, &mut rng, &mut run)?,
        Pipeline::Prop1 => prop1(args, &config, &mut rng, tol, &mut run)?,
        Pipeline::Nocatalysis => nocatalysis(args, &config, tol, &mut run)?,
        Pipeline::Family => family(args, &config, &mut run)?,
    }
    let status = run
        .steps
        .iter()
        .fold(ReportStatus::Feasible, |acc, s| acc.combine(s.status));
    let name = format!("verify {}", format!("{:?}", args.pipeline).to_lowercase());
    let mut report = Report::new(name, ReportStatus::Feasible, config_echo(global, Some(seed))?);
    report.iterations = Some(run.steps.iter().filter_map(|s| s.iterations).sum());
    report.residuals = Residuals::new(None, None, run.steps.last().and_then(|s| s.residual));
    report.witness = run
        .witness
        .as_ref()
        .and_then(|(c, label)| witness(Some(c), global, label));
    report.warnings = run.warnings;
    report.steps = run.steps;
    report.set_status(status);
    Ok(report)
}

/// Reverse construction, solver check and forward extraction for
/// `φ = θ ∘ ψ^c`.
fn thm1(args: &VerifyArgs, config: &SolverConfig, rng: &mut SeededRng, run: &mut Run) -> Result<()> {
    let loaded = load(one_input(args)?)?;
    let k = kraus_of(&loaded, &mut run.warnings)?;
    let psi = k.to_channel();
    let theta = post_processing(args, k.dim_env(), rng)?;
    let phi = compose_choi(&k.complementary(), &theta)?;

    let built = compatibilizer_from_postprocessing(&k, &theta)?;
    let (rb, rc) = compatibilizer_residuals(&built, &psi, &phi)?;
    run.construction("reverse-construction", rb.max(rc), 1e-9);

    let rep = check_compatibility(&psi, &phi, config)?;
    run.compat("compatibility", &rep);
    if let Some(found) = &rep.compatibilizer {
        let ex = postprocessing_from_compatibilizer(found, psi.dim_out(), phi.dim_out())?;
        run.construction("forward-extraction", ex.residual, 1e-7);
        run.witness = Some((found.clone(), "compatibilizer"));
    }
    Ok(())
}

fn thm2i(args: &VerifyArgs, config: &SolverConfig, rng: &mut SeededRng, tol: f64, run: &mut Run) -> Result<()> {
    let loaded = load(one_input(args)?)?;
    let k = kraus_of(&loaded, &mut run.warnings)?;
    let psi = k.to_channel();
    let deg = check_degradable(&psi, &k, config)?;
    run.steps.push(Step::new(
        "degradable",
        deg.status.into(),
        deg.residual,
        deg.solver.map(|s| s.iterations),
    ));
    let Some(lambda) = deg.degrading_map else {
        run.warnings.push("channel not shown degradable; remaining steps skipped".into());
        return Ok(());
    };
    let theta = post_processing(args, k.dim_env(), rng)?;
    let phi = compose_choi(&k.complementary(), &theta)?;
    let div = check_divisibility(&psi, &phi, config)?;
    run.div("divisibility", &div);
    let quotient = quotient_via_degradability(&k, &lambda, &theta, tol)?;
    run.construction("quotient-construction", compose_choi(&psi, &quotient)?.distance(&phi), tol);
    run.witness = Some((quotient, "quotient"));
    Ok(())
}

fn thm2ii(args: &VerifyArgs, config: &SolverConfig, rng: &mut SeededRng, tol: f64, run: &mut Run) -> Result<()> {
    let loaded = load(one_input(args)?)?;
    let k = kraus_of(&loaded, &mut run.warnings)?;
    let psi = k.to_channel();
    let anti = check_antidegradable(&psi, &k, config)?;
    run.steps.push(Step::new(
        "antidegradable",
        anti.status.into(),
        anti.residual,
        anti.solver.map(|s| s.iterations),
    ));
    let Some(lambda) = anti.degrading_map else {
        run.warnings
            .push("channel not shown anti-degradable; remaining steps skipped".into());
        return Ok(());
    };
    let theta = post_processing(args, psi.dim_out(), rng)?;
    let phi = compose_choi(&psi, &theta)?;
    let compat = check_compatibility(&psi, &phi, config)?;
    run.compat("compatibility", &compat);
    let built = compatibilizer_via_antidegradability(&k, &lambda, &theta, tol)?;
    let (rb, rc) = compatibilizer_residuals(&built, &psi, &phi)?;
    run.construction("compatibilizer-construction", rb.max(rc), tol);
    run.witness = Some((built, "compatibilizer"));
    Ok(())
}

fn corollary(args: &VerifyArgs, config: &SolverConfig, rng: &mut SeededRng, run: &mut Run) -> Result<()> {
    let k = match args.inputs.as_slice() {
        [] => KrausSet::self_complementary_qubit(args.family, args.alpha, args.beta)?,
        _ => kraus_of(&load(one_input(args)?)?, &mut run.warnings)?,
    };
    let selfdeg = check_self_degradable(&k);
    run.steps.push(Step::new(
        "self-degradable",
        selfdeg.status.into(),
        selfdeg.self_distance,
        None,
    ));
    let psi = k.to_channel();
    let theta = post_processing(args, psi.dim_out(), rng)?;
    let phi = compose_choi(&psi, &theta)?;
    let compat = check_compatibility(&psi, &phi, config)?;
    run.compat("compatibility", &compat);
    let div = check_divisibility(&psi, &phi, config)?;
    run.div("divisibility", &div);
    run.witness = compat.compatibilizer.map(|c| (c, "compatibilizer"));
    Ok(())
}

fn prop1(args: &VerifyArgs, config: &SolverConfig, rng: &mut SeededRng, tol: f64, run: &mut Run) -> Result<()> {
    let (psi, phi) = match args.inputs.as_slice() {
        [] => {
            let psi = KrausSet::self_complementary_qubit(args.family, args.alpha, args.beta)?.to_channel();
            let theta = post_processing(args, psi.dim_out(), rng)?;
            let phi = compose_choi(&psi, &theta)?;
            (psi, phi)
        }
        [a, b] => (load(a)?.channel(), load(b)?.channel()),
        other => {
            return Err(Error::InvalidParameter(format!(
                "prop1 takes zero or two channel files, got {}",
                other.len()
            )))
        }
    };
    let compat = check_compatibility(&psi, &phi, config)?;
    run.compat("compatibility", &compat);
    let div = check_divisibility(&psi, &phi, config)?;
    run.div("divisibility", &div);
    let (Some(theta_bc), Some(theta_cb)) = (compat.compatibilizer, div.quotient) else {
        run.warnings
            .push("pair not shown both compatible and divisible; remaining steps skipped".into());
        return Ok(());
    };
    // extraction with φ as the first marginal yields φ^c and θ_{B|E}
    let swapped = swap_outputs(&theta_bc, psi.dim_out(), phi.dim_out())?;
    let ex = postprocessing_from_compatibilizer(&swapped, phi.dim_out(), psi.dim_out())?;
    run.construction("complementary-extraction", ex.residual, tol);
    let lambda = antidegrading_map_from_compat_and_div(&theta_cb, &ex.theta_ce)?;
    let residual = compose_choi(&ex.psi_c_enlarged, &lambda)?.distance(&phi);
    run.construction("antidegrading-map", residual, tol);
    run.witness = Some((lambda, "anti-degrading map"));
    Ok(())
}

fn nocatalysis(args: &VerifyArgs, config: &SolverConfig, tol: f64, run: &mut Run) -> Result<()> {
    let [psi, phi, chi] = args.inputs.as_slice() else {
        return Err(Error::InvalidParameter(
            "nocatalysis takes three channel files: psi phi chi".into(),
        ));
    };
    let (psi, phi, chi) = (load(psi)?.channel(), load(phi)?.channel(), load(chi)?.channel());
    let rep = verify_no_catalysis(&psi, &phi, &chi, config)?;
    run.compat("tensored-compatibility", &rep.tensored);
    if let (Some(reduced), Some(rb), Some(rc)) = (rep.reduced, rep.residual_b, rep.residual_c) {
        run.construction("reduction", rb.max(rc), tol);
        run.witness = Some((reduced, "reduced compatibilizer"));
    }
    Ok(())
}

fn family(args: &VerifyArgs, config: &SolverConfig, run: &mut Run) -> Result<()> {
    let members = args
        .inputs
        .iter()
        .map(|p| load(p).map(|l| l.channel()))
        .collect::<Result<Vec<_>>>()?;
    let rep = check_family_divisibility(&members, config)?;
    for (i, step) in rep.steps.iter().enumerate() {
        run.div(&format!("step-{}-{}", i, i + 1), step);
    }
    if run.ok() && rep.steps.is_empty() {
        run.warnings.push("single-member family is divisible vacuously".into());
    }
    Ok(())
}
