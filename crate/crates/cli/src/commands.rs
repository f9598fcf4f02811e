use std::path::Path;

use qcompat::analysis::{
    check_antidegradable, check_compatibility, check_degradable, check_divisibility, check_self_degradable,
    DegradabilityReport,
};
use qcompat::channel::trace_out_pair;
use qcompat::format::{ChannelFile, ConfigEcho, LoadedChannel, Report, ReportStatus, Residuals};
use qcompat::random::{random_unitary, rng_from_seed};
use qcompat::{Channel, Error, KrausSet, Result, SolverConfig};

use crate::{CheckCommand, Example2Part, GlobalOpts, MakeArgs, MakeKind};

pub fn solver_config(global: &GlobalOpts) -> Result<SolverConfig> {
    let config = SolverConfig {
        eps_feas: global.eps,
        max_iter: global.max_iter,
        ..SolverConfig::default()
    };
    config.validate()?;
    Ok(config)
}

pub fn config_echo(global: &GlobalOpts, seed: Option<u64>) -> Result<ConfigEcho> {
    Ok(ConfigEcho {
        solver: solver_config(global)?,
        seed,
    })
}

pub fn load(path: &Path) -> Result<LoadedChannel> {
    ChannelFile::load(path)
        .and_then(|f| f.decode())
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Kraus form of a loaded channel, extracting the canonical one from the
/// Choi spectrum when the file has none.
pub fn kraus_of(loaded: &LoadedChannel, warnings: &mut Vec<String>) -> Result<KrausSet> {
    match loaded.kraus() {
        Some(k) => Ok(k.clone()),
        None => {
            let k = loaded.channel().to_kraus()?;
            warnings.push(format!(
                "input has no Kraus form; used canonical Kraus operators from the Choi spectrum (environment dimension {})",
                k.dim_env()
            ));
            Ok(k)
        }
    }
}

pub fn witness(channel: Option<&Channel>, global: &GlobalOpts, label: &str) -> Option<ChannelFile> {
    if global.quiet {
        return None;
    }
    channel.map(|c| ChannelFile::from_channel(c, Some(label.to_string())))
}

fn emit(file: &ChannelFile, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => file.save(path),
        None => {
            println!("{}", file.to_json_string());
            Ok(())
        }
    }
}

pub fn make(args: &MakeArgs, global: &GlobalOpts) -> Result<()> {
    let label = args.label.clone();
    let file = match args.kind {
        MakeKind::Identity => ChannelFile::from_kraus(&KrausSet::identity(args.dim), label),
        MakeKind::Depolarizing => ChannelFile::from_kraus(&KrausSet::completely_depolarizing(args.dim), label),
        MakeKind::Unitary => {
            let mut rng = rng_from_seed(global.seed.unwrap_or(0));
            ChannelFile::from_kraus(&KrausSet::unitary(random_unitary(args.dim, &mut rng))?, label)
        }
        MakeKind::Selfcomp => ChannelFile::from_kraus(
            &KrausSet::self_complementary_qubit(args.family, args.alpha, args.beta)?,
            label,
        ),
        MakeKind::Damping => ChannelFile::from_kraus(&KrausSet::amplitude_damping(args.gamma)?, label),
        MakeKind::Example2 => {
            let pair = trace_out_pair(&Channel::completely_depolarizing(2), &Channel::identity(2))?;
            let channel = match args.part {
                Example2Part::Psi => pair.psi,
                Example2Part::Phi => pair.phi,
                Example2Part::Compatibilizer => pair.compatibilizer,
            };
            ChannelFile::from_channel(&channel, label)
        }
    };
    emit(&file, args.output.as_deref())
}

pub fn complement(input: &Path, output: Option<&Path>, _global: &GlobalOpts) -> Result<()> {
    let loaded = load(input)?;
    let mut notes = Vec::new();
    let k = kraus_of(&loaded, &mut notes)?;
    for note in notes {
        eprintln!("note: {note}");
    }
    emit(&ChannelFile::from_kraus(&k.complementary_kraus(), Some("complementary".into())), output)
}

fn degradability(name: &str, rep: DegradabilityReport, global: &GlobalOpts, warnings: Vec<String>) -> Result<Report> {
    let mut report = Report::new(name, rep.status.into(), config_echo(global, None)?);
    report.warnings.extend(warnings);
    report.warnings.push(format!(
        "complementary channel taken for this Kraus representation (environment dimension {})",
        rep.env_dim
    ));
    if let Some(s) = rep.solver {
        report.residuals = Residuals::new(Some(s.residual_affine), Some(s.residual_psd), rep.residual);
        report.iterations = Some(s.iterations);
    } else {
        report.residuals = Residuals::new(None, None, rep.self_distance.or(rep.residual));
    }
    if rep.self_distance.is_some_and(f64::is_infinite) {
        report
            .warnings
            .push("output and environment dimensions differ; the channel cannot equal its complementary".into());
    }
    report.witness = witness(rep.degrading_map.as_ref(), global, "degrading map");
    Ok(report)
}

pub fn check(command: &CheckCommand, global: &GlobalOpts) -> Result<Report> {
    let config = solver_config(global)?;
    match command {
        CheckCommand::Compat { psi, phi } => {
            let (psi, phi) = (load(psi)?.channel(), load(phi)?.channel());
            let rep = check_compatibility(&psi, &phi, &config)?;
            let mut report = Report::new("check compat", rep.status.into(), config_echo(global, None)?);
            let verification = rep.residual_b.zip(rep.residual_c).map(|(b, c)| b.max(c));
            report.residuals =
                Residuals::new(Some(rep.solver.residual_affine), Some(rep.solver.residual_psd), verification);
            report.iterations = Some(rep.solver.iterations);
            report.witness = witness(rep.compatibilizer.as_ref(), global, "compatibilizer");
            Ok(report)
        }
        CheckCommand::Div { psi, phi } => {
            let (psi, phi) = (load(psi)?.channel(), load(phi)?.channel());
            let rep = check_divisibility(&psi, &phi, &config)?;
            let mut report = Report::new("check div", rep.status.into(), config_echo(global, None)?);
            report.residuals = Residuals::new(
                Some(rep.solver.residual_affine),
                Some(rep.solver.residual_psd),
                rep.composition_residual,
            );
            report.iterations = Some(rep.solver.iterations);
            report.witness = witness(rep.quotient.as_ref(), global, "quotient");
            Ok(report)
        }
        CheckCommand::Degradable { psi } => {
            let loaded = load(psi)?;
            let mut warnings = Vec::new();
            let k = kraus_of(&loaded, &mut warnings)?;
            let rep = check_degradable(&loaded.channel(), &k, &config)?;
            degradability("check degradable", rep, global, warnings)
        }
        CheckCommand::Antidegradable { psi } => {
            let loaded = load(psi)?;
            let mut warnings = Vec::new();
            let k = kraus_of(&loaded, &mut warnings)?;
            let rep = check_antidegradable(&loaded.channel(), &k, &config)?;
            degradability("check antidegradable", rep, global, warnings)
        }
        CheckCommand::Selfdeg { psi } => {
            let loaded = load(psi)?;
            let mut warnings = Vec::new();
            let k = kraus_of(&loaded, &mut warnings)?;
            let rep = check_self_degradable(&k);
            let mut report = degradability("check selfdeg", rep, global, warnings)?;
            if report.status == ReportStatus::NotFeasibleAtTolerance {
                // an exact comparison, not a stalled solver run
                report.warnings.retain(|w| w != qcompat::format::HEURISTIC_INFEASIBILITY);
            }
            Ok(report)
        }
    }
}
