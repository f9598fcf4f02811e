//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every quantity a criterion asserts is recomputed here by a route that does
//! not share code with the library path that produced it: marginals by
//! partial traces of Choi matrices, compositions by sequential `apply` on
//! matrix units.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qcompat::analysis::{
    antidegrading_map_from_compat_and_div, check_antidegradable, check_compatibility, check_degradable,
    check_divisibility, check_family_divisibility, check_self_degradable, compatibilizer_from_postprocessing,
    compatibilizer_via_antidegradability, postprocessing_from_compatibilizer, quotient_via_degradability,
    swap_outputs, verify_no_catalysis,
};
use qcompat::channel::{
    compose_choi, isometry_from_kraus, kraus_from_choi, kraus_from_isometry, trace_out_pair, EPS_RANK,
};
use qcompat::matrix::{frobenius_distance, identity, kron, partial_trace, unit};
use qcompat::random::{
    random_channel, random_full_rank_channel, random_kraus, random_state, random_unitary, rng_from_seed, SeededRng,
};
use qcompat::{Channel, ComplexMatrix, FeasibilityStatus, KrausSet, SolverConfig, SubsystemDims, C64};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Choi matrix of a linear map from its action on matrix units.
fn choi_via_apply(
    dim_in: usize,
    dim_out: usize,
    f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for a in 0..dim_in {
        for a2 in 0..dim_in {
            let out = f(&unit(dim_in, a, a2));
            j.view_mut((a * dim_out, a2 * dim_out), (dim_out, dim_out)).copy_from(&out);
        }
    }
    j
}

/// `‖J_{θ∘ψ} − J_target‖_F` with the composition evaluated by sequential
/// application.
fn composition_error(psi: &Channel, theta: &Channel, target: &Channel) -> f64 {
    let j = choi_via_apply(psi.dim_in(), theta.dim_out(), |e| {
        theta.apply(&psi.apply(e).unwrap()).unwrap()
    });
    frobenius_distance(&j, target.choi())
}

/// Distances of the two Choi marginals of `θ: A → B ⊗ C` from `J_ψ`, `J_φ`.
fn marginal_errors(theta: &Channel, psi: &Channel, phi: &Channel) -> (f64, f64) {
    let dims = SubsystemDims::new(vec![psi.dim_in(), psi.dim_out(), phi.dim_out()]).unwrap();
    let jb = partial_trace(theta.choi(), &dims, &[0, 1]).unwrap();
    let jc = partial_trace(theta.choi(), &dims, &[0, 2]).unwrap();
    (frobenius_distance(&jb, psi.choi()), frobenius_distance(&jc, phi.choi()))
}

fn is_cptp(c: &Channel, tol: f64) -> bool {
    c.min_choi_eigenvalue() > -tol && c.tp_deviation() < tol
}

/// A random Kraus-rank-two qubit channel accepted by `accept`.
fn sample_until(rng: &mut SeededRng, accept: impl Fn(&KrausSet) -> bool) -> Result<KrausSet, String> {
    for _ in 0..200 {
        let k = random_kraus(2, 2, 2, rng).map_err(|e| e.to_string())?;
        if accept(&k) {
            return Ok(k);
        }
    }
    Err("no accepted channel in 200 draws".into())
}

fn c1_identity_not_self_compatible() -> Outcome {
    let id = Channel::identity(2);
    let rep = check_compatibility(&id, &id, &cfg()).map_err(|e| e.to_string())?;
    let combined = rep.solver.residual_affine + rep.solver.residual_psd;
    ensure(rep.status == FeasibilityStatus::NotFeasibleAtTolerance, || {
        format!("status {:?}", rep.status)
    })?;
    ensure(combined >= 1e-6, || format!("plateau residual {combined:.3e} < 1e-6"))?;
    ensure(rep.solver.iterations <= 20_000, || format!("{} iterations", rep.solver.iterations))?;
    Ok(format!(
        "plateau residual {combined:.3e} after {} iterations",
        rep.solver.iterations
    ))
}

fn c2_identity_divides_identity() -> Outcome {
    let id = Channel::identity(2);
    let rep = check_divisibility(&id, &id, &cfg()).map_err(|e| e.to_string())?;
    let q = rep.quotient.ok_or_else(|| format!("status {:?}", rep.status))?;
    let d = frobenius_distance(q.choi(), id.choi());
    ensure(d < 1e-6, || format!("quotient at distance {d:.3e} from identity"))?;
    Ok(format!("quotient distance to identity {d:.3e}"))
}

fn c3_trace_out_pair_separation() -> Outcome {
    let dep = Channel::completely_depolarizing(2);
    let id = Channel::identity(2);
    let pair = trace_out_pair(&dep, &id).map_err(|e| e.to_string())?;

    // analytic compatibilizer, no solver
    let product = kron(dep.choi(), id.choi());
    let perm = SubsystemDims::new(vec![2, 2, 2, 2]).unwrap();
    let product = qcompat::matrix::permute_subsystems(&product, &perm, &[0, 2, 1, 3]).unwrap();
    let analytic = Channel::from_choi(4, 4, product).map_err(|e| e.to_string())?;
    let (ab, ac) = marginal_errors(&analytic, &pair.psi, &pair.phi);
    ensure(ab.max(ac) < 1e-10, || format!("analytic compatibilizer marginals off by {:.3e}", ab.max(ac)))?;

    let compat = check_compatibility(&pair.psi, &pair.phi, &cfg()).map_err(|e| e.to_string())?;
    let theta = compat
        .compatibilizer
        .ok_or_else(|| format!("compatibility status {:?}", compat.status))?;
    let (rb, rc) = marginal_errors(&theta, &pair.psi, &pair.phi);
    ensure(rb.max(rc) < 1e-7, || format!("solver compatibilizer marginals off by {:.3e}", rb.max(rc)))?;
    ensure(is_cptp(&theta, 1e-7), || "solver compatibilizer is not CPTP".into())?;

    let div = check_divisibility(&pair.psi, &pair.phi, &cfg()).map_err(|e| e.to_string())?;
    ensure(div.status == FeasibilityStatus::NotFeasibleAtTolerance, || {
        format!("divisibility status {:?}", div.status)
    })?;
    Ok(format!(
        "compatible (marginals {:.1e}), not divisible (residual {:.3e}), analytic marginals {:.1e}",
        rb.max(rc),
        div.solver.residual_affine + div.solver.residual_psd,
        ab.max(ac)
    ))
}

/// Complementary channel from the Kraus operators by the trace formula
/// `ψ^c(ρ)_{ij} = Tr[K_j^† K_i ρ]`.
fn complementary_by_trace(k: &KrausSet) -> ComplexMatrix {
    let ops = k.operators();
    let e = ops.len();
    choi_via_apply(k.dim_in(), e, |rho| {
        ComplexMatrix::from_fn(e, e, |i, j| (ops[j].adjoint() * &ops[i] * rho).trace())
    })
}

fn c4_self_complementary_grid() -> Outcome {
    let mut worst_completeness: f64 = 0.0;
    let mut worst_distance: f64 = 0.0;
    let mut origin = f64::NAN;
    for ia in 0..5 {
        for ib in 0..5 {
            let (alpha, beta) = (PI * ia as f64 / 4.0, 2.0 * PI * ib as f64 / 4.0);
            let k = KrausSet::self_complementary_qubit(1, alpha, beta).map_err(|e| e.to_string())?;
            let sum = k
                .operators()
                .iter()
                .fold(ComplexMatrix::zeros(2, 2), |acc, op| acc + op.adjoint() * op);
            worst_completeness = worst_completeness.max(frobenius_distance(&sum, &identity(2)));
            let d = frobenius_distance(k.to_channel().choi(), &complementary_by_trace(&k));
            worst_distance = worst_distance.max(d);
            if ia == 0 && ib == 0 {
                origin = d;
            }
        }
    }
    ensure(worst_completeness < 1e-12, || format!("completeness off by {worst_completeness:.3e}"))?;
    ensure(origin < 1e-10, || format!("distance at the origin {origin:.3e}"))?;
    Ok(format!(
        "completeness {worst_completeness:.1e}, distance at origin {origin:.1e}, largest grid distance {worst_distance:.1e}"
    ))
}

fn c5_not_self_complementary() -> Outcome {
    let mut rng = rng_from_seed(505);
    let mut smallest = f64::INFINITY;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..20 {
        let u = random_unitary(2, &mut rng);
        let single = KrausSet::unitary(u.clone()).map_err(|e| e.to_string())?;
        // the same unitary channel with a two-dimensional environment
        let split = KrausSet::new(vec![&u * C64::new(s, 0.0), &u * C64::new(s, 0.0)]).map_err(|e| e.to_string())?;
        for k in [single, split] {
            let d = check_self_degradable(&k).self_distance.unwrap_or(f64::INFINITY);
            smallest = smallest.min(d);
        }
    }
    let dep = check_self_degradable(&KrausSet::completely_depolarizing(2));
    let d_dep = dep.self_distance.unwrap_or(f64::INFINITY);
    ensure(smallest > 1e-3, || format!("a unitary channel is within {smallest:.3e} of its complementary"))?;
    ensure(d_dep > 1e-3, || format!("depolarizing distance {d_dep:.3e}"))?;
    ensure(!dep.is_feasible(), || "depolarizing reported self-degradable".into())?;
    Ok(format!(
        "smallest unitary distance {smallest:.3e}, depolarizing distance {d_dep:.3e}"
    ))
}

fn c6_complementary_postprocessing_both_directions() -> Outcome {
    let mut rng = rng_from_seed(606);
    let (mut worst_reverse, mut worst_forward): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let din = rng.random_range(2..=3);
        let dout = rng.random_range(2..=3);
        let env = rng.random_range(2..=3);
        let dc = rng.random_range(2..=3);
        let k = random_kraus(din, dout, env, &mut rng).map_err(|e| e.to_string())?;
        let theta = random_full_rank_channel(env, dc, &mut rng).map_err(|e| e.to_string())?;
        let psi = k.to_channel();
        let phi_c = Channel::from_choi(din, env, complementary_by_trace(&k)).map_err(|e| e.to_string())?;
        let phi = compose_choi(&phi_c, &theta).map_err(|e| e.to_string())?;

        let built = compatibilizer_from_postprocessing(&k, &theta).map_err(|e| e.to_string())?;
        let (rb, rc) = marginal_errors(&built, &psi, &phi);
        worst_reverse = worst_reverse.max(rb.max(rc));

        let rep = check_compatibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        let found = rep
            .compatibilizer
            .ok_or_else(|| format!("compatibility {din}->{dout}x{dc} status {:?}", rep.status))?;
        let ex = postprocessing_from_compatibilizer(&found, dout, dc).map_err(|e| e.to_string())?;
        // recheck the extracted chain against the solver marginals by apply
        let dims = SubsystemDims::new(vec![dout, dc]).unwrap();
        let via_chain = choi_via_apply(din, dc, |e| ex.theta_ce.apply(&ex.psi_c_enlarged.apply(e).unwrap()).unwrap());
        let marginal_c = choi_via_apply(din, dc, |e| partial_trace(&found.apply(e).unwrap(), &dims, &[1]).unwrap());
        let independent = frobenius_distance(&via_chain, &marginal_c);
        worst_forward = worst_forward.max(ex.residual).max(independent);
    }
    ensure(worst_reverse < 1e-9, || format!("reverse marginals off by {worst_reverse:.3e}"))?;
    ensure(worst_forward < 1e-7, || format!("forward extraction residual {worst_forward:.3e}"))?;
    Ok(format!(
        "50/50 compatible; reverse {worst_reverse:.1e}, forward {worst_forward:.1e}"
    ))
}

fn c7_degradable_divides() -> Outcome {
    let mut rng = rng_from_seed(707);
    let (mut feasible, mut worst_witness, mut worst_quotient) = (0, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let k = sample_until(&mut rng, |k| {
            check_degradable(&k.to_channel(), k, &cfg()).is_ok_and(|r| r.is_feasible())
        })?;
        let psi = k.to_channel();
        let deg = check_degradable(&psi, &k, &cfg()).map_err(|e| e.to_string())?;
        let lambda = deg.degrading_map.ok_or("degrading map missing")?;
        let comp = Channel::from_choi(2, 2, complementary_by_trace(&k)).map_err(|e| e.to_string())?;
        worst_witness = worst_witness.max(composition_error(&psi, &lambda, &comp));

        let dc = rng.random_range(2..=3);
        let theta = random_full_rank_channel(k.dim_env(), dc, &mut rng).map_err(|e| e.to_string())?;
        let phi = compose_choi(&comp, &theta).map_err(|e| e.to_string())?;
        let div = check_divisibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        if div.is_feasible() {
            feasible += 1;
        }
        let quotient = quotient_via_degradability(&k, &lambda, &theta, 1e-6).map_err(|e| e.to_string())?;
        worst_quotient = worst_quotient.max(composition_error(&psi, &quotient, &phi));
    }
    ensure(worst_witness < 1e-7, || format!("degrading witness residual {worst_witness:.3e}"))?;
    ensure(feasible == 50, || format!("divisibility feasible on {feasible}/50"))?;
    ensure(worst_quotient < 1e-7, || format!("constructed quotient residual {worst_quotient:.3e}"))?;
    Ok(format!(
        "{feasible}/50 divisible; witness {worst_witness:.1e}, constructed quotient {worst_quotient:.1e}"
    ))
}

fn c8_antidegradable_compatible() -> Outcome {
    let mut rng = rng_from_seed(808);
    let (mut feasible, mut worst_solver, mut worst_built) = (0, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let k = sample_until(&mut rng, |k| {
            check_antidegradable(&k.to_channel(), k, &cfg()).is_ok_and(|r| r.is_feasible())
        })?;
        let psi = k.to_channel();
        let anti = check_antidegradable(&psi, &k, &cfg()).map_err(|e| e.to_string())?;
        let lambda = anti.degrading_map.ok_or("anti-degrading map missing")?;
        let dc = rng.random_range(2..=3);
        let theta = random_full_rank_channel(2, dc, &mut rng).map_err(|e| e.to_string())?;
        let phi = compose_choi(&psi, &theta).map_err(|e| e.to_string())?;

        let rep = check_compatibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        if let Some(found) = &rep.compatibilizer {
            feasible += 1;
            let (rb, rc) = marginal_errors(found, &psi, &phi);
            worst_solver = worst_solver.max(rb.max(rc));
        }
        let built = compatibilizer_via_antidegradability(&k, &lambda, &theta, 1e-6).map_err(|e| e.to_string())?;
        let (rb, rc) = marginal_errors(&built, &psi, &phi);
        worst_built = worst_built.max(rb.max(rc));
    }
    ensure(feasible == 50, || format!("compatibility feasible on {feasible}/50"))?;
    ensure(worst_solver < 1e-7, || format!("solver compatibilizer marginals {worst_solver:.3e}"))?;
    ensure(worst_built < 1e-7, || format!("constructed compatibilizer marginals {worst_built:.3e}"))?;
    Ok(format!(
        "{feasible}/50 compatible; solver marginals {worst_solver:.1e}, constructed {worst_built:.1e}"
    ))
}

fn c9_self_degradable_equivalence() -> Outcome {
    let k = KrausSet::self_complementary_qubit(1, 0.0, 0.0).map_err(|e| e.to_string())?;
    let psi = k.to_channel();
    let mut rng = rng_from_seed(909);
    let (mut both, mut worst): (usize, f64) = (0, 0.0);
    for _ in 0..20 {
        let theta = random_channel(2, 2, &mut rng).map_err(|e| e.to_string())?;
        let phi = compose_choi(&psi, &theta).map_err(|e| e.to_string())?;
        let compat = check_compatibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        let div = check_divisibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        if let (Some(c), Some(q)) = (&compat.compatibilizer, &div.quotient) {
            both += 1;
            let (rb, rc) = marginal_errors(c, &psi, &phi);
            worst = worst.max(rb).max(rc).max(composition_error(&psi, q, &phi));
        }
    }
    ensure(both == 20, || format!("both checks feasible on {both}/20"))?;
    ensure(worst < 1e-6, || format!("witness residual {worst:.3e}"))?;
    Ok(format!("{both}/20 compatible and divisible; witnesses {worst:.1e}"))
}

fn c10_compatible_and_divisible_antidegradable() -> Outcome {
    let mut rng = rng_from_seed(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = rng.random_range(0.0..PI);
        let beta = rng.random_range(0.0..2.0 * PI);
        let psi = KrausSet::self_complementary_qubit(1, alpha, beta)
            .map_err(|e| e.to_string())?
            .to_channel();
        let theta0 = random_full_rank_channel(2, 2, &mut rng).map_err(|e| e.to_string())?;
        let phi = compose_choi(&psi, &theta0).map_err(|e| e.to_string())?;
        let compat = check_compatibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        let div = check_divisibility(&psi, &phi, &cfg()).map_err(|e| e.to_string())?;
        let (Some(theta_bc), Some(theta_cb)) = (compat.compatibilizer, div.quotient) else {
            return Err(format!("instance not certified: {:?} / {:?}", compat.status, div.status));
        };
        let swapped = swap_outputs(&theta_bc, 2, 2).map_err(|e| e.to_string())?;
        let ex = postprocessing_from_compatibilizer(&swapped, 2, 2).map_err(|e| e.to_string())?;
        let lambda = antidegrading_map_from_compat_and_div(&theta_cb, &ex.theta_ce).map_err(|e| e.to_string())?;
        worst = worst.max(composition_error(&ex.psi_c_enlarged, &lambda, &phi));
    }
    ensure(worst < 1e-7, || format!("anti-degrading residual {worst:.3e}"))?;
    Ok(format!("20/20 instances; anti-degrading residual {worst:.1e}"))
}

/// Self-compatible qubit channel with a positive definite Choi operator:
/// a measure-and-prepare channel mixed with the completely depolarizing one.
fn self_compatible_catalyst(rng: &mut SeededRng) -> Channel {
    let (s0, s1) = (random_state(2, rng), random_state(2, rng));
    let mp = choi_via_apply(2, 2, |x| &s0 * x[(0, 0)] + &s1 * x[(1, 1)]);
    let dep = Channel::completely_depolarizing(2);
    Channel::from_choi(2, 2, mp * C64::new(0.7, 0.0) + dep.choi() * C64::new(0.3, 0.0)).unwrap()
}

fn c11_no_catalysis() -> Outcome {
    let mut rng = rng_from_seed(1111);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let k = random_kraus(2, 2, 2, &mut rng).map_err(|e| e.to_string())?;
        let theta = random_full_rank_channel(2, 2, &mut rng).map_err(|e| e.to_string())?;
        let psi = k.to_channel();
        let phi = compose_choi(&k.complementary(), &theta).map_err(|e| e.to_string())?;
        let chi = self_compatible_catalyst(&mut rng);
        let rep = verify_no_catalysis(&psi, &phi, &chi, &cfg()).map_err(|e| e.to_string())?;
        let reduced = rep
            .reduced
            .ok_or_else(|| format!("tensored pair status {:?}", rep.tensored.status))?;
        let (rb, rc) = marginal_errors(&reduced, &psi, &phi);
        ensure(is_cptp(&reduced, 1e-6), || "reduced map is not CPTP".into())?;
        worst = worst.max(rb).max(rc);
    }
    ensure(worst < 1e-8, || format!("reduced marginals off by {worst:.3e}"))?;
    let id = Channel::identity(2);
    let rep = verify_no_catalysis(&id, &id, &id, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.tensored.status == FeasibilityStatus::NotFeasibleAtTolerance, || {
        format!("identity catalysis status {:?}", rep.tensored.status)
    })?;
    Ok(format!(
        "10/10 reduced marginals {worst:.1e}; identity with identity catalyst not feasible"
    ))
}

fn c12_round_trips() -> Outcome {
    let mut rng = rng_from_seed(1212);
    let (mut worst_rep, mut worst_comp): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let din: usize = rng.random_range(2..=4);
        let dout = rng.random_range(2..=4);
        let env = rng.random_range(din.div_ceil(dout)..=din * dout);
        let psi = random_kraus(din, dout, env, &mut rng).map_err(|e| e.to_string())?.to_channel();
        let k = kraus_from_choi(&psi, EPS_RANK).map_err(|e| e.to_string())?;
        let v = isometry_from_kraus(&k);
        let back = kraus_from_isometry(&v).to_channel();
        let via_conj = choi_via_apply(din, dout, |rho| {
            let out = v.matrix() * rho * v.matrix().adjoint();
            let dims = SubsystemDims::new(vec![dout, v.dim_env()]).unwrap();
            partial_trace(&out, &dims, &[0]).unwrap()
        });
        worst_rep = worst_rep
            .max(frobenius_distance(back.choi(), psi.choi()))
            .max(frobenius_distance(&via_conj, psi.choi()));

        let dc = rng.random_range(2..=4);
        let theta = random_channel(dout, dc, &mut rng).map_err(|e| e.to_string())?;
        let composed = compose_choi(&psi, &theta).map_err(|e| e.to_string())?;
        worst_comp = worst_comp.max(composition_error(&psi, &theta, &composed));
    }
    ensure(worst_rep < 1e-10, || format!("representation round trip {worst_rep:.3e}"))?;
    ensure(worst_comp < 1e-10, || format!("composition mismatch {worst_comp:.3e}"))?;
    Ok(format!("round trips {worst_rep:.1e}, compositions {worst_comp:.1e}"))
}

fn c13_family_of_powers() -> Outcome {
    let mut rng = rng_from_seed(1313);
    let psi = random_channel(2, 2, &mut rng).map_err(|e| e.to_string())?;
    let mut family = vec![psi.clone()];
    for _ in 1..4 {
        let next = choi_via_apply(2, 2, |e| psi.apply(&family.last().unwrap().apply(e).unwrap()).unwrap());
        family.push(Channel::from_choi(2, 2, next).map_err(|e| e.to_string())?);
    }
    let rep = check_family_divisibility(&family, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.steps.len() == 3, || format!("{} steps", rep.steps.len()))?;
    let mut worst: f64 = 0.0;
    for (i, step) in rep.steps.iter().enumerate() {
        let q = step
            .quotient
            .as_ref()
            .ok_or_else(|| format!("step {i} status {:?}", step.status))?;
        worst = worst.max(frobenius_distance(q.choi(), psi.choi()));
    }
    ensure(worst < 1e-5, || format!("quotient at distance {worst:.3e} from the generator"))?;
    Ok(format!("3/3 steps divisible; quotient distance {worst:.1e}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "identity is not self-compatible", limit: Duration::from_secs(10), run: c1_identity_not_self_compatible },
        Criterion { id: 2, name: "identity divides identity", limit: Duration::from_secs(5), run: c2_identity_divides_identity },
        Criterion { id: 3, name: "compatible but not divisible pair", limit: Duration::from_secs(60), run: c3_trace_out_pair_separation },
        Criterion { id: 4, name: "self-complementary family grid", limit: Duration::from_secs(5), run: c4_self_complementary_grid },
        Criterion { id: 5, name: "unitary and depolarizing not self-complementary", limit: Duration::from_secs(5), run: c5_not_self_complementary },
        Criterion { id: 6, name: "compatibility via complementary post-processing", limit: Duration::from_secs(300), run: c6_complementary_postprocessing_both_directions },
        Criterion { id: 7, name: "degradable channels divide compatible partners", limit: Duration::from_secs(600), run: c7_degradable_divides },
        Criterion { id: 8, name: "anti-degradable channels are compatible with their post-processings", limit: Duration::from_secs(600), run: c8_antidegradable_compatible },
        Criterion { id: 9, name: "self-degradable channel: compatibility and divisibility agree", limit: Duration::from_secs(300), run: c9_self_degradable_equivalence },
        Criterion { id: 10, name: "compatible and divisible implies anti-degradable", limit: Duration::from_secs(300), run: c10_compatible_and_divisible_antidegradable },
        Criterion { id: 11, name: "no catalysis of compatibility", limit: Duration::from_secs(600), run: c11_no_catalysis },
        Criterion { id: 12, name: "representation round trips", limit: Duration::from_secs(60), run: c12_round_trips },
        Criterion { id: 13, name: "family of powers is divisible", limit: Duration::from_secs(120), run: c13_family_of_powers },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let elapsed = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time limit")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {verdict}: {} ({detail}; {:.2} s of {} s)",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}
