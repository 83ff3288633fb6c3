//! Scenario execution. Every row pairs a result with an independent oracle.

use potent_core::linalg::{Hermitian, Operator, StateVector, Unitary, C64};
use potent_core::meters::{
    pointer_shift_experiment, GaussianPointer, MomentumOperator, QubitMeter, DEFAULT_DIMENSION_CAP,
};
use potent_core::pps::{
    apparatus_state_from_potent_values, assemble_apparatus_controlled, assemble_system_controlled,
    joint_evolve_and_postselect, modular_value, potent_completeness_residual, potent_operator,
    potent_operator_apparatus_controlled, potent_operator_system_controlled, potent_values, weak_value,
    CouplingSpec, OrthonormalBasis, PrePostSelection,
};
use potent_core::timemachine::{potent_time_superposition, superposed_evolution, time_translation_machine};
use potent_core::{random, verify};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{GaussianSpec, MeterSpec, ScenarioConfig, ScenarioKind};
use crate::error::CliError;
use crate::output::{Cell, ResultRow};

/// Spectral-sum oracle for the weak value.
pub const WEAK_VALUE_TOL: f64 = 1e-12;
/// Spectral-sum oracle for the modular value.
pub const MODULAR_VALUE_TOL: f64 = 1e-12;
/// Potent values, potent operators and the completeness identity.
pub const POTENT_TOL: f64 = 1e-10;
/// Pointer states against the per-eigenvalue branch sum.
pub const POINTER_TOL: f64 = 1e-10;
pub const CONDITIONAL_TOL: f64 = 1e-12;
pub const TIME_MACHINE_TOL: f64 = 1e-12;

type Rows = Result<Vec<ResultRow>, CliError>;

fn rel(x: C64, reference: C64) -> f64 {
    (x - reference).norm() / reference.norm().max(1.0)
}

/// `Σ_j f(a_j)·⟨φ|e_j⟩⟨e_j|ψ⟩ / ⟨φ|ψ⟩` over the eigenpairs of `a`.
fn spectral_ratio(a: &Operator, sel: &PrePostSelection, f: impl Fn(f64) -> C64) -> Result<C64, CliError> {
    let spec = Hermitian::new(a.clone())?.eigen()?;
    let mut sum = C64::new(0.0, 0.0);
    for (j, &l) in spec.eigenvalues().iter().enumerate() {
        let e = spec.eigenvector(j);
        sum += f(l) * sel.phi().inner(&e)? * e.inner(sel.psi())?;
    }
    Ok(sum / sel.overlap())
}

/// `Σ_j ⟨φ|e_j⟩⟨e_j|ψ⟩·exp(−i·g·a_j·P)|Φ⟩`, applied in momentum space.
fn pointer_branch_sum(
    a: &Operator,
    sel: &PrePostSelection,
    g: f64,
    pointer: &GaussianPointer,
) -> Result<StateVector, CliError> {
    let spec = Hermitian::new(a.clone())?.eigen()?;
    let p = MomentumOperator::new(*pointer.grid());
    let mut acc = StateVector::zeros(pointer.grid().size());
    for (j, &l) in spec.eigenvalues().iter().enumerate() {
        let e = spec.eigenvector(j);
        let w = sel.phi().inner(&e)? * e.inner(sel.psi())?;
        acc = acc.add(&p.exp_apply(C64::new(0.0, -g * l), pointer.state())?.scaled(w))?;
    }
    Ok(acc)
}

/// `max |a − e^{iθ}·b|` with `θ` aligning `b` to `a` through their overlap.
/// Avoids pivoting the global phase on tiny tail amplitudes.
fn phase_aligned_diff(a: &StateVector, b: &StateVector) -> Result<f64, CliError> {
    let o = b.inner(a)?;
    let phase = if o.norm() > 0.0 { o / o.norm() } else { C64::new(1.0, 0.0) };
    Ok(a.max_abs_diff(&b.scaled(phase))?)
}

fn pointer(spec: &GaussianSpec) -> Result<GaussianPointer, CliError> {
    Ok(GaussianPointer::build(spec.grid_size, spec.x_min, spec.x_max, spec.sigma, spec.x0)?)
}

fn gaussian_meter(cfg: &ScenarioConfig) -> GaussianSpec {
    match &cfg.meter {
        Some(MeterSpec::Gaussian(g)) => *g,
        _ => GaussianSpec::default(),
    }
}

fn pps_inputs(cfg: &ScenarioConfig) -> (&PrePostSelection, &Operator) {
    (
        cfg.selection.as_ref().expect("validated"),
        cfg.observable.as_ref().expect("validated"),
    )
}

fn weak_value_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, a) = pps_inputs(cfg);
    let pointer = pointer(&gaussian_meter(cfg))?;
    let aw = weak_value(a, sel)?;
    let value_residual = rel(aw, spectral_ratio(a, sel, |l| C64::new(l, 0.0))?);
    cfg.couplings
        .iter()
        .map(|&g| {
            let report = pointer_shift_experiment(a, sel, g, &pointer, DEFAULT_DIMENSION_CAP)?;
            let oracle_p = pointer_branch_sum(a, sel, g, &pointer)?.norm().powi(2);
            let residual = value_residual.max((report.probability - oracle_p).abs());
            Ok(ResultRow::new(&cfg.name, residual, WEAK_VALUE_TOL)
                .num("g", g)
                .num("value_re", aw.re)
                .num("value_im", aw.im)
                .num("prob_exact", report.probability))
        })
        .collect()
}

fn modular_value_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, a) = pps_inputs(cfg);
    let aw = weak_value(a, sel)?;
    cfg.couplings
        .iter()
        .map(|&g| {
            let m = modular_value(a, g, sel)?;
            let oracle = spectral_ratio(a, sel, |l| C64::new(0.0, -g * l).exp())?;
            let estimate = if g == 0.0 {
                aw
            } else {
                (C64::new(1.0, 0.0) - m) / C64::new(0.0, g)
            };
            Ok(ResultRow::new(&cfg.name, rel(m, oracle), MODULAR_VALUE_TOL)
                .num("g", g)
                .num("value_re", m.re)
                .num("value_im", m.im)
                .num("weak_estimate_re", estimate.re)
                .num("weak_estimate_im", estimate.im))
        })
        .collect()
}

/// Joint unitary, meter state and, for qubit meters, the closed-form reduction.
struct Coupled {
    unitary: Unitary,
    meter: StateVector,
    qubit: Option<QubitMeter>,
}

fn coupled(cfg: &ScenarioConfig, g: f64) -> Result<Coupled, CliError> {
    let (_, a) = pps_inputs(cfg);
    match cfg.meter.as_ref().expect("validated") {
        MeterSpec::Qubit(q) => Ok(Coupled {
            unitary: QubitMeter::coupling_unitary(a, g)?,
            meter: q.state(),
            qubit: Some(*q),
        }),
        MeterSpec::State {
            state,
            observable: Some(b),
        } => Ok(Coupled {
            unitary: CouplingSpec::new(g, a.clone(), b.clone())?.unitary()?,
            meter: state.clone(),
            qubit: None,
        }),
        other => unreachable!("validation admits no {other:?} here"),
    }
}

fn potent_values_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, a) = pps_inputs(cfg);
    let mut rows = Vec::new();
    for &g in &cfg.couplings {
        let c = coupled(cfg, g)?;
        let basis = OrthonormalBasis::computational(c.meter.dim());
        let pvs = potent_values(&c.unitary, &c.meter, &basis, sel)?;
        let oracle = joint_evolve_and_postselect(&c.unitary, sel.psi(), &c.meter, sel.phi())?;
        let mut residual = apparatus_state_from_potent_values(&pvs)?.max_abs_diff(&oracle.state.normalized()?)?;
        residual = residual.max((pvs.probability() - oracle.probability).abs());
        if let Some(q) = c.qubit {
            let closed = q.predicted_potent_values(a, g, sel)?;
            for (v, w) in pvs.values().iter().zip(closed) {
                residual = residual.max(rel(*v, w));
            }
        }
        for (k, v) in pvs.values().iter().enumerate() {
            rows.push(
                ResultRow::new(&cfg.name, residual, POTENT_TOL)
                    .num("g", g)
                    .int("k", k as i64)
                    .num("value_re", v.re)
                    .num("value_im", v.im)
                    .num("prob_exact", oracle.probability),
            );
        }
    }
    Ok(rows)
}

fn potent_operator_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, a) = pps_inputs(cfg);
    let mut rows = Vec::new();
    for &g in &cfg.couplings {
        let c = coupled(cfg, g)?;
        let up = potent_operator(c.unitary.operator(), sel)?;
        let oracle = joint_evolve_and_postselect(&c.unitary, sel.psi(), &c.meter, sel.phi())?;
        let mut residual = up.apply(&c.meter)?.scaled(sel.overlap()).max_abs_diff(&oracle.state)?;
        if c.qubit.is_some() {
            residual = residual.max(up.matrix().max_abs_diff(&QubitMeter::predicted_potent_operator(a, g, sel)?)?);
        }
        let d = up.matrix().dim();
        for i in 0..d {
            for j in 0..d {
                let v = up.matrix().entry(i, j);
                rows.push(
                    ResultRow::new(&cfg.name, residual, POTENT_TOL)
                        .num("g", g)
                        .int("row", i as i64)
                        .int("col", j as i64)
                        .num("value_re", v.re)
                        .num("value_im", v.im),
                );
            }
        }
    }
    Ok(rows)
}

fn completeness_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, _) = pps_inputs(cfg);
    cfg.couplings
        .iter()
        .map(|&g| {
            let c = coupled(cfg, g)?;
            let basis = OrthonormalBasis::computational(c.meter.dim());
            let residual = potent_completeness_residual(&c.unitary, sel.phi(), &basis)?;
            let p = joint_evolve_and_postselect(&c.unitary, sel.psi(), &c.meter, sel.phi())?.probability;
            Ok(ResultRow::new(&cfg.name, residual, POTENT_TOL).num("g", g).num("prob_exact", p))
        })
        .collect()
}

fn pointer_shift_rows(cfg: &ScenarioConfig) -> Rows {
    let (sel, a) = pps_inputs(cfg);
    let spec = gaussian_meter(cfg);
    let pointer = pointer(&spec)?;
    cfg.couplings
        .iter()
        .map(|&g| {
            let r = pointer_shift_experiment(a, sel, g, &pointer, DEFAULT_DIMENSION_CAP)?;
            let oracle = pointer_branch_sum(a, sel, g, &pointer)?;
            let residual = phase_aligned_diff(&r.exact_state, &oracle.unit()?)?
                .max((r.probability - oracle.norm().powi(2)).abs());
            Ok(ResultRow::new(&cfg.name, residual, POINTER_TOL)
                .num("g", g)
                .num("sigma", spec.sigma)
                .num("weak_re", r.weak_value.re)
                .num("weak_im", r.weak_value.im)
                .num("mean_shift", r.mean_shift)
                .num("predicted_shift", r.predicted_shift)
                .num("momentum_shift", r.momentum_shift)
                .num("predicted_momentum_shift", r.predicted_momentum_shift)
                .num("trace_distance", r.trace_distance())
                .num("prob_exact", r.probability))
        })
        .collect()
}

fn conditional_rows(cfg: &ScenarioConfig) -> Rows {
    let spec = cfg.conditional.expect("validated");
    let (s, a) = (spec.system_dim, spec.apparatus_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for instance in 0..spec.instances {
        let sel = match &cfg.selection {
            Some(sel) => sel.clone(),
            None => verify::sample_selection(&mut rng, s),
        };

        let projectors = verify::random_projector_family(&mut rng, s);
        let unitaries: Vec<Unitary> = projectors.iter().map(|_| random::unitary(&mut rng, a)).collect();
        let reduced = potent_operator_system_controlled(&projectors, &unitaries, &sel)?;
        let joint = assemble_system_controlled(&projectors, &unitaries)?;
        let direct = potent_operator(&joint, &sel)?;
        let sum: C64 = reduced.coefficients.iter().sum();
        let residual = reduced
            .operator
            .matrix()
            .max_abs_diff(direct.matrix())?
            .max(reduced.coefficient_sum_residual());
        rows.push(
            ResultRow::new(&cfg.name, residual, CONDITIONAL_TOL)
                .int("instance", instance as i64)
                .text("control", "system")
                .int("branches", projectors.len() as i64)
                .num("coefficient_sum_re", sum.re)
                .num("coefficient_sum_im", sum.im),
        );

        let projectors = verify::random_projector_family(&mut rng, a);
        let generators: Vec<Operator> = projectors
            .iter()
            .map(|_| random::hermitian(&mut rng, s).into_operator())
            .collect();
        let reduced = potent_operator_apparatus_controlled(&generators, &projectors, spec.lambda, &sel)?;
        let joint = assemble_apparatus_controlled(&generators, &projectors, spec.lambda)?;
        let direct = potent_operator(&joint, &sel)?;
        let sum: C64 = reduced.coefficients.iter().sum();
        rows.push(
            ResultRow::new(
                &cfg.name,
                reduced.operator.matrix().max_abs_diff(direct.matrix())?,
                CONDITIONAL_TOL,
            )
            .int("instance", instance as i64)
            .text("control", "apparatus")
            .int("branches", projectors.len() as i64)
            .num("coefficient_sum_re", sum.re)
            .num("coefficient_sum_im", sum.im),
        );
    }
    Ok(rows)
}

fn time_machine_rows(cfg: &ScenarioConfig) -> Rows {
    let spec = cfg.time_machine.as_ref().expect("validated");
    let meter = match cfg.meter.as_ref().expect("validated") {
        MeterSpec::State { state, .. } => state,
        other => unreachable!("validation admits no {other:?} here"),
    };
    let outcome = time_translation_machine(spec, meter)?;
    let family = spec.as_family()?;
    let up = potent_time_superposition(&family, spec.coefficients())?;
    let sup = superposed_evolution(&family, spec.coefficients(), meter)?;
    let residual = up
        .apply(meter)?
        .max_abs_diff(&sup.state)?
        .max(outcome.state.max_abs_diff(&sup.state)?);
    Ok(vec![ResultRow::new(&cfg.name, residual, TIME_MACHINE_TOL)
        .num("t_eff", outcome.effective_duration)
        .num("fidelity", outcome.fidelity)
        .num("success_norm", outcome.success_norm)
        .num("l1_norm", spec.coefficients().l1_norm())])
}

/// Runs one scenario at its configured seed, one row per coupling (or per branch).
pub fn run_scenario(cfg: &ScenarioConfig) -> Rows {
    match cfg.kind {
        ScenarioKind::WeakValue => weak_value_rows(cfg),
        ScenarioKind::ModularValue => modular_value_rows(cfg),
        ScenarioKind::PotentValues => potent_values_rows(cfg),
        ScenarioKind::PotentOperator => potent_operator_rows(cfg),
        ScenarioKind::Completeness => completeness_rows(cfg),
        ScenarioKind::PointerShift => pointer_shift_rows(cfg),
        ScenarioKind::Conditional => conditional_rows(cfg),
        ScenarioKind::TimeMachine => time_machine_rows(cfg),
    }
}

/// Runs every sweep point concurrently. Rows come back in declared sweep order,
/// each tagged with a `seed` column.
pub fn run_sweep(cfg: &ScenarioConfig) -> Rows {
    let points: Vec<(u64, Option<f64>)> = match &cfg.sweep {
        Some(s) => {
            let sigmas: Vec<Option<f64>> = if s.sigmas.is_empty() {
                vec![None]
            } else {
                s.sigmas.iter().copied().map(Some).collect()
            };
            s.seeds
                .iter()
                .flat_map(|&seed| sigmas.iter().map(move |&sigma| (seed, sigma)))
                .collect()
        }
        None => vec![(cfg.seed, None)],
    };
    let results: Vec<Rows> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .iter()
            .map(|&(seed, sigma)| {
                let point = cfg.at_sweep_point(seed, sigma);
                scope.spawn(move || run_scenario(&point))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut rows = Vec::new();
    for ((seed, _), batch) in points.iter().zip(results) {
        for mut r in batch? {
            r.cells.insert(0, ("seed", Cell::Int(*seed as i64)));
            rows.push(r);
        }
    }
    Ok(rows)
}

/// The built-in invariant suite as rows: one per check.
pub fn verify_rows(seed: u64) -> Rows {
    let mut rows = Vec::new();
    for (group, checks) in verify::full_suite(seed)? {
        for c in checks {
            rows.push(
                ResultRow::new(group, c.deviation(), c.tolerance)
                    .text("check", c.name.clone())
                    .num("measured", c.measured)
                    .cell("target", c.target.map_or(Cell::Missing, Cell::Num)),
            );
        }
    }
    Ok(rows)
}
