//! Superpositions of time evolutions realized as potent operators, and the
//! time-translation machine built from them.
//!
//! A control system in `|ψ⟩ ∝ Σ_i c_i|a_i⟩` conditions the apparatus
//! evolution `exp(−i·H(a_i)·T)`; post-selecting the control on
//! `|φ⟩ ∝ Σ_i |a_i⟩` leaves the apparatus acted on by `Σ_i c_i·exp(−i·H(a_i)·T)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Hermitian, Operator, StateVector, Unitary, C64, ZERO_NORM};
use crate::pps::{potent_operator_tagged, PotentOperator, PrePostSelection};

/// Tolerance on `Σ_i c_i = 1`.
pub const COEFFICIENT_SUM_TOL: f64 = 1e-12;

const SCAN_POINTS: usize = 1000;
const DEGENERATE_FIDELITY: f64 = 1e-9;

type Generator = dyn Fn(f64) -> Result<Operator> + Send + Sync;

/// Hamiltonians `H(a)` on the apparatus, evaluated at parameters `a_i` for a
/// common duration `T`.
#[derive(Clone)]
pub struct EvolutionFamily {
    parameters: Vec<f64>,
    duration: f64,
    dim: usize,
    generator: Arc<Generator>,
}

impl fmt::Debug for EvolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionFamily")
            .field("parameters", &self.parameters)
            .field("duration", &self.duration)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl EvolutionFamily {
    pub fn new<F>(parameters: Vec<f64>, duration: f64, generator: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Operator> + Send + Sync + 'static,
    {
        if parameters.is_empty() {
            return Err(Error::InvalidParameter("evolution family needs at least one parameter".into()));
        }
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::InvalidParameter(format!("duration {duration} must be finite and >= 0")));
        }
        let mut dim = None;
        for &a in &parameters {
            let h = Hermitian::new(generator(a)?)?;
            match dim {
                None => dim = Some(h.dim()),
                Some(d) if d != h.dim() => {
                    return Err(Error::DimensionMismatch {
                        context: "family generator",
                        expected: d,
                        found: h.dim(),
                    })
                }
                _ => {}
            }
        }
        Ok(Self {
            parameters,
            duration,
            dim: dim.unwrap(),
            generator: Arc::new(generator),
        })
    }

    /// `H(a) = a·H₀`.
    pub fn linear(h0: Operator, parameters: Vec<f64>, duration: f64) -> Result<Self> {
        Hermitian::new(h0.clone())?;
        Self::new(parameters, duration, move |a| Ok(h0.scaled(C64::new(a, 0.0))))
    }

    pub fn parameters(&self) -> &[f64] {
        &self.parameters
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self, a: f64) -> Result<Hermitian> {
        let h = Hermitian::new((self.generator)(a)?)?;
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "family generator",
                expected: self.dim,
                found: h.dim(),
            });
        }
        Ok(h)
    }

    /// `exp(−i·H(a)·T)`.
    pub fn evolution(&self, a: f64) -> Result<Unitary> {
        self.hamiltonian(a)?.evolution(self.duration)
    }
}

/// Complex weights `c_i` with `Σ_i c_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionSpec {
    coefficients: Vec<C64>,
}

impl SuperpositionSpec {
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("superposition needs at least one coefficient".into()));
        }
        let sum: C64 = coefficients.iter().sum();
        if (sum - C64::new(1.0, 0.0)).norm() > COEFFICIENT_SUM_TOL {
            return Err(Error::CoefficientSum { re: sum.re, im: sum.im });
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `Σ_i |c_i|`, which bounds the success norm.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }
}

fn check_lengths(family: &EvolutionFamily, spec: &SuperpositionSpec) -> Result<()> {
    if family.parameters.len() != spec.len() {
        return Err(Error::LengthMismatch {
            what: "parameters and coefficients",
            left: family.parameters.len(),
            right: spec.len(),
        });
    }
    Ok(())
}

/// Unnormalized apparatus state and its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposedState {
    pub state: StateVector,
    pub success_norm: f64,
}

/// `Σ_i c_i·exp(−i·H(a_i)·T)|Φ⟩`.
pub fn superposed_evolution(
    family: &EvolutionFamily,
    spec: &SuperpositionSpec,
    meter: &StateVector,
) -> Result<SuperposedState> {
    check_lengths(family, spec)?;
    meter.ensure_normalized()?;
    let mut acc = StateVector::zeros(meter.dim());
    for (&a, &c) in family.parameters.iter().zip(spec.coefficients()) {
        acc = acc.add(&family.evolution(a)?.apply(meter)?.scaled(c))?;
    }
    let success_norm = acc.norm();
    Ok(SuperposedState {
        state: acc,
        success_norm,
    })
}

/// `Σ_i |a_i⟩⟨a_i| ⊗ exp(−i·H(a_i)·T)` on control ⊗ apparatus.
pub fn conditional_evolution(family: &EvolutionFamily) -> Result<Unitary> {
    let n = family.parameters.len();
    let d = family.dim;
    let mut joint = Operator::zeros(n * d);
    for (i, &a) in family.parameters.iter().enumerate() {
        let basis = StateVector::basis(n, i)?;
        let proj = Operator::outer(&basis, &basis)?;
        joint = joint.checked_add(&proj.kron(family.evolution(a)?.operator()))?;
    }
    Unitary::new(joint)
}

/// Control-system pre- and post-selection: `ψ ∝ Σ_i c_i|a_i⟩`, `φ = Σ_i |a_i⟩/√N`.
pub fn control_selection(spec: &SuperpositionSpec) -> Result<PrePostSelection> {
    let n = spec.len();
    let psi = StateVector::new(spec.coefficients().to_vec())?.unit()?;
    let phi = StateVector::new(vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n])?;
    PrePostSelection::new(psi, phi)
}

/// Potent operator of the conditional evolution under the control selection.
pub fn potent_time_superposition(family: &EvolutionFamily, spec: &SuperpositionSpec) -> Result<PotentOperator> {
    check_lengths(family, spec)?;
    let u = conditional_evolution(family)?;
    let sel = control_selection(spec)?;
    potent_operator_tagged(&u, &sel, "superposition of time evolutions")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterFit {
    pub parameter: f64,
    pub fidelity: f64,
}

/// Finds the `a′` in `[lo, hi]` whose single evolution best matches the
/// superposed one, by overlap magnitude.
///
/// When the magnitude is flat across the interval (for example when `Φ` is
/// an eigenstate of every `H(a)`), the fit instead maximizes the real part of
/// the overlap so that `a′` also reproduces the phase.
pub fn effective_parameter_fit(
    family: &EvolutionFamily,
    spec: &SuperpositionSpec,
    meter: &StateVector,
    lo: f64,
    hi: f64,
) -> Result<ParameterFit> {
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::InvalidParameter(format!("search interval [{lo}, {hi}] is invalid")));
    }
    let sup = superposed_evolution(family, spec, meter)?;
    if sup.success_norm <= ZERO_NORM {
        return Err(Error::EmptyResult { norm: sup.success_norm });
    }
    let target = sup.state.unit()?;
    let overlap = |a: f64| -> Result<C64> { family.evolution(a)?.apply(meter)?.inner(&target) };

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut scan = Vec::with_capacity(SCAN_POINTS);
    for k in 0..SCAN_POINTS {
        let a = lo + k as f64 * step;
        scan.push((a, overlap(a)?));
    }
    let best = scan.iter().map(|(_, o)| o.norm()).fold(0.0, f64::max);
    let flat = scan.iter().all(|(_, o)| best - o.norm() <= DEGENERATE_FIDELITY);
    let score = |o: C64| if flat { o.re } else { o.norm() };

    let (k_best, _) = scan
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| score(x.1).total_cmp(&score(y.1)))
        .unwrap();
    let mut left = (scan[k_best].0 - step).max(lo);
    let mut right = (scan[k_best].0 + step).min(hi);

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = right - ratio * (right - left);
    let mut x2 = left + ratio * (right - left);
    let mut f1 = score(overlap(x1)?);
    let mut f2 = score(overlap(x2)?);
    while right - left > 1e-12 * (1.0 + right.abs().max(left.abs())) {
        if f1 < f2 {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + ratio * (right - left);
            f2 = score(overlap(x2)?);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - ratio * (right - left);
            f1 = score(overlap(x1)?);
        }
    }
    let mut parameter = 0.5 * (left + right);
    let mut fidelity = overlap(parameter)?.norm();
    let (a_scan, o_scan) = scan[k_best];
    if o_scan.norm() > fidelity {
        parameter = a_scan;
        fidelity = o_scan.norm();
    }
    Ok(ParameterFit { parameter, fidelity })
}

/// A single Hamiltonian run for durations `T_i` and superposed with weights `c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTranslationSpec {
    durations: Vec<f64>,
    coefficients: SuperpositionSpec,
    hamiltonian: Hermitian,
}

impl TimeTranslationSpec {
    pub fn new(durations: Vec<f64>, coefficients: SuperpositionSpec, hamiltonian: Operator) -> Result<Self> {
        if durations.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                what: "durations and coefficients",
                left: durations.len(),
                right: coefficients.len(),
            });
        }
        if let Some(t) = durations.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(format!("duration {t} is not finite")));
        }
        Ok(Self {
            durations,
            coefficients,
            hamiltonian: Hermitian::new(hamiltonian)?,
        })
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn coefficients(&self) -> &SuperpositionSpec {
        &self.coefficients
    }

    pub fn hamiltonian(&self) -> &Hermitian {
        &self.hamiltonian
    }

    /// `T′ = Σ_i c_i·T_i`.
    pub fn effective_duration(&self) -> C64 {
        self.durations
            .iter()
            .zip(self.coefficients.coefficients())
            .map(|(&t, &c)| c * t)
            .sum()
    }

    /// The same machine as an evolution family `H(T) = H` with unit duration
    /// scaled by `T`, i.e. `exp(−i·H·T_i)` for each branch.
    pub fn as_family(&self) -> Result<EvolutionFamily> {
        let h = self.hamiltonian.operator().clone();
        EvolutionFamily::linear(h, self.durations.clone(), 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeMachineOutcome {
    /// `Σ_i c_i·exp(−i·H·T_i)|Φ⟩`, unnormalized.
    pub state: StateVector,
    pub effective_duration: f64,
    /// `|⟨exp(−i·H·T′)Φ | normalized result⟩|`.
    pub fidelity: f64,
    pub success_norm: f64,
}

impl TimeMachineOutcome {
    /// True when the nominal evolution runs towards the past.
    pub fn runs_backward(&self) -> bool {
        self.effective_duration < 0.0
    }
}

pub fn time_translation_machine(spec: &TimeTranslationSpec, meter: &StateVector) -> Result<TimeMachineOutcome> {
    let t_eff = spec.effective_duration();
    if t_eff.im.abs() > COEFFICIENT_SUM_TOL * (1.0 + t_eff.re.abs()) {
        return Err(Error::InvalidParameter(format!(
            "effective duration {t_eff} is not real"
        )));
    }
    let family = spec.as_family()?;
    let sup = superposed_evolution(&family, spec.coefficients(), meter)?;
    if sup.success_norm <= ZERO_NORM {
        return Err(Error::EmptyResult { norm: sup.success_norm });
    }
    let nominal = spec.hamiltonian().evolution(t_eff.re)?.apply(meter)?;
    let fidelity = nominal.inner(&sup.state.unit()?)?.norm();
    Ok(TimeMachineOutcome {
        state: sup.state,
        effective_duration: t_eff.re,
        fidelity,
        success_norm: sup.success_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates};

    fn sigma_z_family(params: Vec<f64>, t: f64) -> EvolutionFamily {
        EvolutionFamily::linear(gates::pauli_z(), params, t).unwrap()
    }

    #[test]
    fn coefficient_sum_enforced() {
        assert!(matches!(SuperpositionSpec::from_real(&[0.5, 0.4]), Err(Error::CoefficientSum { .. })));
        assert!(SuperpositionSpec::from_real(&[2.0, -1.0]).is_ok());
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let r = EvolutionFamily::new(vec![0.1], 1.0, |_| Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_superposition_is_a_single_evolution() {
        let fam = EvolutionFamily::linear(gates::pauli_x(), vec![0.4, 0.4, 0.4], 1.5).unwrap();
        let spec = SuperpositionSpec::from_real(&[0.5, 2.0, -1.5]).unwrap();
        let meter = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let out = superposed_evolution(&fam, &spec, &meter).unwrap();
        let single = fam.evolution(0.4).unwrap().apply(&meter).unwrap();
        assert!(out.state.max_abs_diff(&single).unwrap() < 1e-14);
        assert!((out.success_norm - 1.0).abs() < 1e-14);
        let fit = effective_parameter_fit(&fam, &spec, &meter, 0.0, 1.0).unwrap();
        assert!((fit.parameter - 0.4).abs() < 1e-6);
        assert!((fit.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_term_superposition() {
        let fam = EvolutionFamily::linear(gates::pauli_y(), vec![0.3, 0.9], 2.0).unwrap();
        let spec = SuperpositionSpec::from_real(&[1.0, 0.0]).unwrap();
        let meter = StateVector::basis(2, 0).unwrap();
        let out = superposed_evolution(&fam, &spec, &meter).unwrap();
        let single = fam.evolution(0.3).unwrap().apply(&meter).unwrap();
        assert!(out.state.max_abs_diff(&single).unwrap() < 1e-14);
    }

    #[test]
    fn eigenstate_picks_up_scalar_phase_sum() {
        let (params, t) = (vec![0.2, 0.5, 1.3], 0.7);
        let fam = sigma_z_family(params.clone(), t);
        let spec = SuperpositionSpec::new(vec![c(0.5, 0.5), c(0.8, -0.2), c(-0.3, -0.3)]).unwrap();
        let meter = StateVector::basis(2, 1).unwrap(); // eigenvalue -1
        let lambda = -1.0;
        let phase_sum: C64 = params
            .iter()
            .zip(spec.coefficients())
            .map(|(a, ci)| ci * C64::new(0.0, -a * lambda * t).exp())
            .sum();
        let out = superposed_evolution(&fam, &spec, &meter).unwrap();
        assert!(out.state.max_abs_diff(&meter.scaled(phase_sum)).unwrap() < 1e-14);
        assert!((out.success_norm - phase_sum.norm()).abs() < 1e-14);
    }

    #[test]
    fn two_term_potent_operator_matches_direct_sum() {
        let fam = EvolutionFamily::linear(gates::pauli_x(), vec![0.1, 0.2], 1.0).unwrap();
        let spec = SuperpositionSpec::from_real(&[2.0, -1.0]).unwrap();
        let up = potent_time_superposition(&fam, &spec).unwrap();
        let x = Hermitian::new(gates::pauli_x()).unwrap();
        let direct = &x.evolution(0.1).unwrap().scaled(c(2.0, 0.0)) - x.evolution(0.2).unwrap().operator();
        assert!(up.matrix().max_abs_diff(&direct).unwrap() <= 1e-12);
    }

    #[test]
    fn single_parameter_potent_operator() {
        let fam = EvolutionFamily::linear(gates::pauli_y(), vec![0.8], 1.2).unwrap();
        let spec = SuperpositionSpec::from_real(&[1.0]).unwrap();
        let up = potent_time_superposition(&fam, &spec).unwrap();
        assert!(up.matrix().max_abs_diff(&fam.evolution(0.8).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn linear_generator_fit_solves_phase_equation() {
        let (params, t) = (vec![0.3, 0.6], 1.0);
        let fam = sigma_z_family(params.clone(), t);
        let spec = SuperpositionSpec::from_real(&[1.5, -0.5]).unwrap();
        let meter = StateVector::basis(2, 0).unwrap(); // eigenvalue +1
        let fit = effective_parameter_fit(&fam, &spec, &meter, -1.0, 1.0).unwrap();
        let phase_sum: C64 = params
            .iter()
            .zip(spec.coefficients())
            .map(|(a, ci)| ci * C64::new(0.0, -a * t).exp())
            .sum();
        // arg(Σ c_i e^{-i a_i λ T}) = -a′ λ T (mod 2π)
        let residual = (phase_sum.arg() + fit.parameter * t).rem_euclid(std::f64::consts::TAU);
        let residual = residual.min(std::f64::consts::TAU - residual);
        assert!(residual < 1e-6, "a′ = {}", fit.parameter);
        assert!((fit.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_vanishing_superposition() {
        // c = (1/2, 1/2) with opposite phases e^{∓iπ/2} cancels on an eigenstate.
        let fam = sigma_z_family(vec![-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2], 1.0);
        let spec = SuperpositionSpec::from_real(&[0.5, 0.5]).unwrap();
        let meter = StateVector::basis(2, 0).unwrap();
        let r = effective_parameter_fit(&fam, &spec, &meter, -1.0, 1.0);
        assert!(matches!(r, Err(Error::EmptyResult { .. })));
    }

    #[test]
    fn equal_durations_give_exact_evolution() {
        let spec = TimeTranslationSpec::new(
            vec![1.7, 1.7],
            SuperpositionSpec::from_real(&[3.0, -2.0]).unwrap(),
            gates::pauli_x(),
        )
        .unwrap();
        let meter = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let out = time_translation_machine(&spec, &meter).unwrap();
        assert!((out.effective_duration - 1.7).abs() < 1e-15);
        assert!((out.fidelity - 1.0).abs() < 1e-12);
        assert!((out.success_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_effective_duration_on_eigenstate() {
        let spec = TimeTranslationSpec::new(
            vec![1.0, 2.0],
            SuperpositionSpec::from_real(&[2.0, -1.0]).unwrap(),
            gates::pauli_z(),
        )
        .unwrap();
        let meter = StateVector::basis(2, 0).unwrap();
        let out = time_translation_machine(&spec, &meter).unwrap();
        assert_eq!(out.effective_duration, 0.0);
        assert!((out.fidelity - 1.0).abs() <= 1e-12);
        let expected = (c(0.0, -1.0).exp() * 2.0 - c(0.0, -2.0).exp()).norm();
        assert!((out.success_norm - expected).abs() < 1e-14);
        assert!((out.success_norm - 1.0).abs() > 0.1);
    }

    #[test]
    fn backward_translation_is_reported() {
        let spec = TimeTranslationSpec::new(
            vec![1.0, 3.0],
            SuperpositionSpec::from_real(&[2.0, -1.0]).unwrap(),
            gates::pauli_z(),
        )
        .unwrap();
        let out = time_translation_machine(&spec, &StateVector::basis(2, 1).unwrap()).unwrap();
        assert_eq!(out.effective_duration, -1.0);
        assert!(out.runs_backward());
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let fam = sigma_z_family(vec![0.1, 0.2, 0.3], 1.0);
        let spec = SuperpositionSpec::from_real(&[2.0, -1.0]).unwrap();
        let r = superposed_evolution(&fam, &spec, &StateVector::basis(2, 0).unwrap());
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
        assert!(TimeTranslationSpec::new(vec![1.0], spec, gates::pauli_z()).is_err());
    }
}
