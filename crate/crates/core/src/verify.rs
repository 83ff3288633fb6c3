//! Seeded numerical checks of the library's identities and reductions.
//!
//! Each check reports the worst residual it saw next to the tolerance it was
//! held to. The `potent verify` subcommand and the acceptance tests both run
//! these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{gates, hermitian_exponential, Hermitian, Operator, StateVector, Unitary, C64};
use crate::meters::{pointer_shift_experiment, GaussianPointer, QubitMeter, DEFAULT_DIMENSION_CAP};
use crate::pps::{
    apparatus_state_from_potent_values, assemble_apparatus_controlled, assemble_system_controlled,
    joint_evolve_and_postselect, modular_value, potent_completeness_residual, potent_operator,
    potent_operator_apparatus_controlled, potent_operator_system_controlled, potent_values, weak_value,
    weak_value_from_modular, OrthonormalBasis, PrePostSelection,
};
use crate::random;
use crate::timemachine::{
    potent_time_superposition, superposed_evolution, time_translation_machine, EvolutionFamily, SuperpositionSpec,
    TimeTranslationSpec,
};

/// Random selections are redrawn until `|⟨φ|ψ⟩|` reaches this.
pub const SAMPLED_MIN_OVERLAP: f64 = 0.1;

/// Factor dimensions used by the randomized joint-space checks.
pub const FACTOR_DIMS: [usize; 3] = [2, 3, 4];

/// Outcome of one check: `passed` iff `measured` lies within the accepted range.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Value `measured` is compared against; `None` for upper bounds.
    pub target: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: None,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    /// Passes when `|measured − target| <= tolerance`.
    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: Some(target),
            tolerance,
            passed: (measured - target).abs() <= tolerance,
        }
    }

    /// Distance from the accepted region's anchor: `measured` or `|measured − target|`.
    pub fn deviation(&self) -> f64 {
        match self.target {
            Some(t) => (self.measured - t).abs(),
            None => self.measured,
        }
    }

    /// Re-evaluates the check under a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.deviation() <= tolerance;
        self
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random normalized selection with `|⟨φ|ψ⟩| >= SAMPLED_MIN_OVERLAP`.
pub fn sample_selection<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PrePostSelection {
    loop {
        let psi = random::state(rng, dim);
        let phi = random::state(rng, dim);
        if phi.inner(&psi).map(|o| o.norm()).unwrap_or(0.0) >= SAMPLED_MIN_OVERLAP {
            return PrePostSelection::new(psi, phi).expect("overlap checked above");
        }
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R) -> usize {
    FACTOR_DIMS[rng.gen_range(0..FACTOR_DIMS.len())]
}

/// The amplification pair `ψ = (√3/2, 1/2)`, `φ = (√3/2, −1/2)`.
pub fn amplification_selection() -> PrePostSelection {
    let s = 3f64.sqrt() / 2.0;
    PrePostSelection::new(
        StateVector::from_real(&[s, 0.5]).unwrap(),
        StateVector::from_real(&[s, -0.5]).unwrap(),
    )
    .unwrap()
}

/// Weak value 2 and modular value −2i of `σ_z` on the amplification pair.
pub fn amplification_example() -> Result<Vec<Check>> {
    let sel = amplification_selection();
    let z = gates::pauli_z();
    let aw = weak_value(&z, &sel)?;
    let m = modular_value(&z, std::f64::consts::FRAC_PI_2, &sel)?;
    Ok(vec![
        Check::at_most("weak value of sigma_z = 2", (aw - C64::new(2.0, 0.0)).norm(), 1e-14),
        Check::at_most("modular value at g = pi/2 = -2i", (m - C64::new(0.0, -2.0)).norm(), 1e-12),
    ])
}

/// Generic potent values and potent operator against the qubit-meter closed forms.
pub fn qubit_meter_reduction(seed: u64, draws: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let (mut worst_values, mut worst_op, mut worst_state) = (0.0f64, 0.0f64, 0.0f64);
    let basis = OrthonormalBasis::computational(2);
    for _ in 0..draws {
        let a = random::hermitian(&mut r, 2);
        let g = r.gen_range(0.0..std::f64::consts::TAU);
        let sel = sample_selection(&mut r, 2);
        let m = random::state(&mut r, 2);
        let meter = QubitMeter::new(m.amplitudes()[0], m.amplitudes()[1])?;
        let u = Unitary::new(hermitian_exponential(&a.kron(&gates::excited_projector()), C64::new(0.0, -g))?)?;

        let pvs = potent_values(&u, &meter.state(), &basis, &sel)?;
        let expected = meter.predicted_potent_values(&a, g, &sel)?;
        for (v, e) in pvs.values().iter().zip(expected) {
            worst_values = worst_values.max((v - e).norm());
        }
        let up = potent_operator(&u, &sel)?;
        worst_op = worst_op.max(up.matrix().max_abs_diff(&QubitMeter::predicted_potent_operator(&a, g, &sel)?)?);
        let state = apparatus_state_from_potent_values(&pvs)?;
        worst_state = worst_state.max(state.max_abs_diff(&meter.predicted_state(&a, g, &sel)?.normalized()?)?);
    }
    Ok(vec![
        Check::at_most("qubit meter potent values = (alpha, beta*<A>_M)", worst_values, 1e-12),
        Check::at_most("qubit meter potent operator = |0><0| + <A>_M |1><1|", worst_op, 1e-12),
        Check::at_most("qubit meter final state", worst_state, 1e-12),
    ])
}

/// Apparatus state from potent values, from the potent operator, and from the
/// oracle, plus the probability identity.
pub fn oracle_equivalence(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let (mut worst_state, mut worst_prob, mut worst_basis) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let (s, a) = (pick(&mut r), pick(&mut r));
        let u = random::unitary(&mut r, s * a);
        let meter = random::state(&mut r, a);
        let sel = sample_selection(&mut r, s);
        let basis = OrthonormalBasis::computational(a);

        let pvs = potent_values(&u, &meter, &basis, &sel)?;
        let from_values = apparatus_state_from_potent_values(&pvs)?;
        let from_operator = potent_operator(&u, &sel)?.apply(&meter)?.normalized()?;
        let oracle = joint_evolve_and_postselect(&u, sel.psi(), &meter, sel.phi())?;
        let from_oracle = oracle.state.normalized()?;
        worst_state = worst_state
            .max(from_values.max_abs_diff(&from_operator)?)
            .max(from_values.max_abs_diff(&from_oracle)?)
            .max(from_operator.max_abs_diff(&from_oracle)?);
        worst_prob = worst_prob.max((pvs.probability() - oracle.probability).abs());

        let rotated = OrthonormalBasis::new(random::orthonormal_vectors(&mut r, a))?;
        let other = apparatus_state_from_potent_values(&potent_values(&u, &meter, &rotated, &sel)?)?;
        worst_basis = worst_basis.max(other.max_abs_diff(&from_values)?);
    }
    Ok(vec![
        Check::at_most("apparatus state: potent values vs potent operator vs oracle", worst_state, 1e-10),
        Check::at_most("probability identity |values|^2 |<phi|psi>|^2 = p_exact", worst_prob, 1e-10),
        Check::at_most("apparatus state independent of apparatus basis", worst_basis, 1e-10),
    ])
}

/// `Σ_n |⟨φ|ψ_n⟩|²·U_P·U_P† = I` for every dimension pair.
pub fn completeness_identity(seed: u64, per_pair: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut worst_kraus = 0.0f64;
    for &s in &FACTOR_DIMS {
        for &a in &FACTOR_DIMS {
            for _ in 0..per_pair {
                let u = random::unitary(&mut r, s * a);
                let phi = random::state(&mut r, s);
                let basis = OrthonormalBasis::new(random::orthonormal_vectors(&mut r, s))?;
                worst = worst.max(potent_completeness_residual(&u, &phi, &basis)?);

                let meter = random::state(&mut r, a);
                let slices = crate::pps::kraus_slices(&u, &meter, &OrthonormalBasis::computational(a))?;
                let mut acc = Operator::zeros(s);
                for k in &slices {
                    acc = &acc + &(&k.adjoint() * k);
                }
                worst_kraus = worst_kraus.max(acc.max_abs_diff(&Operator::identity(s))?);
            }
        }
    }
    Ok(vec![
        Check::at_most("potent operator completeness identity", worst, 1e-10),
        Check::at_most("Kraus slice completeness", worst_kraus, 1e-10),
    ])
}

/// Measurements behind the weak-limit convergence check.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakLimitSweep {
    pub strengths: Vec<f64>,
    /// `√(1 − F²)` between exact and weak-limit pointer states.
    pub trace_distances: Vec<f64>,
    /// `1 − F`.
    pub infidelities: Vec<f64>,
    pub shift_at_smallest: f64,
    pub predicted_shift_at_smallest: f64,
}

impl WeakLimitSweep {
    pub fn trace_distance_ratios(&self) -> Vec<f64> {
        self.trace_distances.windows(2).map(|w| w[0] / w[1]).collect()
    }

    pub fn infidelity_ratios(&self) -> Vec<f64> {
        self.infidelities.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

pub fn weak_limit_sweep() -> Result<WeakLimitSweep> {
    let sel = amplification_selection();
    let pointer = GaussianPointer::standard();
    let z = gates::pauli_z();
    let strengths = vec![0.2, 0.1, 0.05];
    let mut trace_distances = Vec::new();
    let mut infidelities = Vec::new();
    for &g in &strengths {
        let rep = pointer_shift_experiment(&z, &sel, g, &pointer, DEFAULT_DIMENSION_CAP)?;
        trace_distances.push(rep.trace_distance());
        infidelities.push(1.0 - rep.fidelity);
    }
    let rep = pointer_shift_experiment(&z, &sel, 0.025, &pointer, DEFAULT_DIMENSION_CAP)?;
    Ok(WeakLimitSweep {
        strengths,
        trace_distances,
        infidelities,
        shift_at_smallest: rep.mean_shift,
        predicted_shift_at_smallest: rep.predicted_shift,
    })
}

/// Exact post-selected pointer converges to `exp(−i·g·A_w·P)|Φ⟩`.
pub fn weak_limit_convergence() -> Result<Vec<Check>> {
    let sweep = weak_limit_sweep()?;
    let mut checks: Vec<Check> = sweep
        .trace_distance_ratios()
        .into_iter()
        .zip(sweep.strengths.windows(2))
        .map(|(ratio, g)| Check::near(format!("state distance ratio g={} -> g={}", g[0], g[1]), ratio, 4.0, 0.5))
        .collect();
    let error = (sweep.shift_at_smallest - sweep.predicted_shift_at_smallest).abs();
    checks.push(Check::at_most(
        "pointer shift at g=0.025 vs g*Re A_w (relative)",
        error / sweep.predicted_shift_at_smallest.abs(),
        0.05,
    ));
    Ok(checks)
}

/// Splits `0..dim` into a random number of non-empty contiguous blocks.
fn random_blocks<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<std::ops::Range<usize>> {
    let mut cuts: Vec<usize> = (1..dim).filter(|_| rng.gen_bool(0.5)).collect();
    cuts.insert(0, 0);
    cuts.push(dim);
    cuts.windows(2).map(|w| w[0]..w[1]).collect()
}

/// Orthogonal projectors onto random blocks of a random basis.
pub fn random_projector_family<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Operator> {
    let vectors = random::orthonormal_vectors(rng, dim);
    random_blocks(rng, dim)
        .into_iter()
        .map(|block| {
            let mut p = Operator::zeros(dim);
            for v in &vectors[block] {
                p = &p + &Operator::outer(v, v).unwrap();
            }
            p
        })
        .collect()
}

/// System- and apparatus-controlled reductions against the assembled joint unitary.
pub fn conditional_reductions(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let (mut worst_sys, mut worst_app, mut worst_sum) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let (s, a) = (pick(&mut r), pick(&mut r));
        let sel = sample_selection(&mut r, s);

        let projectors = random_projector_family(&mut r, s);
        let unitaries: Vec<Unitary> = projectors.iter().map(|_| random::unitary(&mut r, a)).collect();
        let reduced = potent_operator_system_controlled(&projectors, &unitaries, &sel)?;
        let joint = assemble_system_controlled(&projectors, &unitaries)?;
        let direct = potent_operator(&joint, &sel)?;
        worst_sys = worst_sys.max(reduced.operator.matrix().max_abs_diff(direct.matrix())?);
        worst_sum = worst_sum.max(reduced.coefficient_sum_residual());

        let projectors = random_projector_family(&mut r, a);
        let generators: Vec<Operator> =
            projectors.iter().map(|_| random::hermitian(&mut r, s).into_operator()).collect();
        let lambda = r.gen_range(-3.0..3.0);
        let reduced = potent_operator_apparatus_controlled(&generators, &projectors, lambda, &sel)?;
        let joint = assemble_apparatus_controlled(&generators, &projectors, lambda)?;
        let direct = potent_operator(&joint, &sel)?;
        worst_app = worst_app.max(reduced.operator.matrix().max_abs_diff(direct.matrix())?);
    }
    Ok(vec![
        Check::at_most("system-controlled potent operator = sum <Pi_n>_w U_n", worst_sys, 1e-12),
        Check::at_most("apparatus-controlled potent operator = sum <A_n>_M P_n", worst_app, 1e-12),
        Check::at_most("weak values of complete projectors sum to 1", worst_sum, 1e-12),
    ])
}

fn random_coefficients<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SuperpositionSpec {
    let mut c: Vec<C64> = (0..n - 1).map(|_| random::complex_normal(rng)).collect();
    let rest: C64 = c.iter().sum();
    c.push(C64::new(1.0, 0.0) - rest);
    SuperpositionSpec::new(c).expect("last coefficient closes the sum")
}

/// Potent operator of the conditional evolution against the direct
/// superposition, and the `c = (2, −1)`, `T = (1, 2)` machine on eigenstates.
pub fn time_machine(seed: u64, families: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut worst_bound = f64::NEG_INFINITY;
    for _ in 0..families {
        let dim = r.gen_range(1..=8);
        let n = r.gen_range(1..=5);
        let h0 = random::hermitian(&mut r, dim).into_operator();
        let h1 = random::hermitian(&mut r, dim).into_operator();
        let params: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let family =
            EvolutionFamily::new(params, r.gen_range(0.0..2.0), move |a| Ok(&h0 + &h1.scaled(C64::new(a, 0.0))))?;
        let spec = random_coefficients(&mut r, n);
        let meter = random::state(&mut r, dim);
        let up = potent_time_superposition(&family, &spec)?;
        let sup = superposed_evolution(&family, &spec, &meter)?;
        worst = worst.max(up.apply(&meter)?.max_abs_diff(&sup.state)?);
        worst_bound = worst_bound.max(sup.success_norm / spec.l1_norm() - 1.0);
    }

    let spec = SuperpositionSpec::from_real(&[2.0, -1.0])?;
    let mut worst_fid = 0.0f64;
    let mut worst_t = 0.0f64;
    let mut hamiltonians = vec![gates::pauli_z(), gates::pauli_x()];
    hamiltonians.push(random::hermitian(&mut r, 4).into_operator());
    for h in hamiltonians {
        let machine = TimeTranslationSpec::new(vec![1.0, 2.0], spec.clone(), h.clone())?;
        let eig = Hermitian::new(h)?.eigen()?;
        for j in 0..eig.eigenvalues().len() {
            let out = time_translation_machine(&machine, &eig.eigenvector(j).unit()?)?;
            worst_t = worst_t.max(out.effective_duration.abs());
            worst_fid = worst_fid.max((1.0 - out.fidelity).abs());
        }
    }
    Ok(vec![
        Check::at_most("potent time superposition = direct superposed evolution", worst, 1e-12),
        Check::at_most("success norm / sum |c_i| - 1", worst_bound.max(0.0), 1e-12),
        Check::at_most("preset c=(2,-1), T=(1,2): |T'|", worst_t, 1e-12),
        Check::at_most("preset c=(2,-1), T=(1,2): |1 - fidelity| on eigenstates", worst_fid, 1e-12),
    ])
}

/// Residual `|(1 − ⟨A⟩_M(g))/(ig) − ⟨A⟩_w|` halves with `g`.
pub fn modular_weak_limit(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let strengths = [0.1, 0.05, 0.025];
    let mut worst = 0.0f64;
    for _ in 0..count {
        let dim = r.gen_range(2..=4);
        let h = random::hermitian(&mut r, dim);
        let scale = h.eigen()?.eigenvalues().iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let a = h.scaled(C64::new(1.0 / scale, 0.0));
        let sel = sample_selection(&mut r, dim);
        let aw = weak_value(&a, &sel)?;
        let residuals = strengths
            .iter()
            .map(|&g| Ok((weak_value_from_modular(&a, g, &sel)? - aw).norm()))
            .collect::<Result<Vec<f64>>>()?;
        for w in residuals.windows(2) {
            worst = worst.max((w[0] / w[1] - 2.0).abs() / 2.0);
        }
    }
    Ok(vec![Check::at_most(
        "modular -> weak residual halves per halving of g (relative deviation from 2)",
        worst,
        0.25,
    )])
}

/// Weak value, modular value, potent values and potent operator are
/// unchanged by rescaling `ψ` and `φ`.
pub fn scale_invariance(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (s, a) = (pick(&mut r), pick(&mut r));
        let sel = sample_selection(&mut r, s);
        let scaled = PrePostSelection::new(
            sel.psi().scaled(random::nonzero_scale(&mut r)),
            sel.phi().scaled(random::nonzero_scale(&mut r)),
        )?;
        let obs = random::hermitian(&mut r, s);
        let g = r.gen_range(-3.0..3.0);
        worst = worst.max((weak_value(&obs, &sel)? - weak_value(&obs, &scaled)?).norm());
        worst = worst.max((modular_value(&obs, g, &sel)? - modular_value(&obs, g, &scaled)?).norm());

        let u = random::unitary(&mut r, s * a);
        let meter = random::state(&mut r, a);
        let basis = OrthonormalBasis::computational(a);
        let v1 = potent_values(&u, &meter, &basis, &sel)?;
        let v2 = potent_values(&u, &meter, &basis, &scaled)?;
        for (x, y) in v1.values().iter().zip(v2.values()) {
            worst = worst.max((x - y).norm());
        }
        let o1 = potent_operator(&u, &sel)?;
        let o2 = potent_operator(&u, &scaled)?;
        worst = worst.max(o1.matrix().max_abs_diff(o2.matrix())?);
    }
    Ok(vec![Check::at_most("invariance under rescaling psi and phi", worst, 1e-12)])
}

/// Every check with its default seed and sample count.
pub fn full_suite(seed: u64) -> Result<Vec<(&'static str, Vec<Check>)>> {
    Ok(vec![
        ("amplification", amplification_example()?),
        ("qubit-meter", qubit_meter_reduction(seed, 100)?),
        ("oracle-equivalence", oracle_equivalence(seed, 50)?),
        ("completeness", completeness_identity(seed, 50)?),
        ("weak-limit", weak_limit_convergence()?),
        ("conditional", conditional_reductions(seed, 50)?),
        ("time-machine", time_machine(seed, 50)?),
        ("modular-limit", modular_weak_limit(seed, 20)?),
        ("scale-invariance", scale_invariance(seed, 50)?),
    ])
}
