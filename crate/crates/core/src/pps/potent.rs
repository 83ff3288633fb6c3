use super::{weak_value, CouplingSpec, PrePostSelection};
use crate::error::{Error, Result};
use crate::linalg::{
    general_exponential, partial_matrix_element, Factor, JointSpace, Operator, StateVector, Unitary, C64,
    ORTHONORMAL_TOL, ZERO_NORM,
};
use crate::linalg::max_identity_defect;

/// Basis vectors with `|⟨k|Φ⟩|` at or below this get a zero weak-limit value.
pub const METER_AMPLITUDE_FLOOR: f64 = 1e-12;

/// A complete orthonormal basis of one Hilbert space factor.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<StateVector>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let dim = vectors.first().map(StateVector::dim).ok_or(Error::IncompleteBasis {
            expected: 1,
            found: 0,
        })?;
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: "basis vector",
                expected: dim,
                found: v.dim(),
            });
        }
        if vectors.len() != dim {
            return Err(Error::IncompleteBasis {
                expected: dim,
                found: vectors.len(),
            });
        }
        let gram = nalgebra::DMatrix::from_fn(dim, dim, |i, j| vectors[i].inner(&vectors[j]).unwrap());
        let defect = max_identity_defect(&gram);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormalBasis { defect });
        }
        Ok(Self { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim.max(1)).map(|k| StateVector::basis(dim.max(1), k).unwrap()).collect(),
        }
    }

    /// Columns of a unitary matrix.
    pub fn from_unitary(u: &Unitary) -> Self {
        let vectors = (0..u.dim())
            .map(|j| StateVector::new(u.matrix().column(j).iter().copied().collect()).unwrap())
            .collect();
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    /// `Σ_k c_k |k⟩`.
    pub fn combine(&self, coefficients: &[C64]) -> Result<StateVector> {
        if coefficients.len() != self.dim() {
            return Err(Error::LengthMismatch {
                what: "basis expansion",
                left: self.dim(),
                right: coefficients.len(),
            });
        }
        let mut acc = StateVector::zeros(self.dim());
        for (k, ck) in self.vectors.iter().zip(coefficients) {
            acc = acc.add(&k.scaled(*ck))?;
        }
        Ok(acc)
    }
}

fn split_space(u: &Operator, meter_dim: usize) -> Result<JointSpace> {
    if meter_dim == 0 || !u.dim().is_multiple_of(meter_dim) {
        return Err(Error::DimensionMismatch {
            context: "joint operator over meter",
            expected: meter_dim,
            found: u.dim(),
        });
    }
    JointSpace::new(u.dim() / meter_dim, meter_dim)
}

/// Operators `A_k = ⟨k|U|Φ⟩` on the system, one per apparatus basis vector.
pub fn kraus_slices(u: &Unitary, meter: &StateVector, basis: &OrthonormalBasis) -> Result<Vec<Operator>> {
    meter.ensure_normalized()?;
    if basis.dim() != meter.dim() {
        return Err(Error::DimensionMismatch {
            context: "apparatus basis",
            expected: meter.dim(),
            found: basis.dim(),
        });
    }
    let space = split_space(u, meter.dim())?;
    basis
        .vectors()
        .iter()
        .map(|k| partial_matrix_element(u, space, k, meter, Factor::Apparatus))
        .collect()
}

/// The potent values `A_p^(k) = ⟨φ|A_k|ψ⟩ / ⟨φ|ψ⟩` over an apparatus basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentValueSet {
    basis: OrthonormalBasis,
    values: Vec<C64>,
    selection: PrePostSelection,
    meter_state: StateVector,
}

impl PotentValueSet {
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn selection(&self) -> &PrePostSelection {
        &self.selection
    }

    pub fn meter_state(&self) -> &StateVector {
        &self.meter_state
    }

    /// `Σ_k A_p^(k) |k⟩` without normalization.
    pub fn unnormalized_state(&self) -> Result<StateVector> {
        self.basis.combine(&self.values)
    }

    /// `‖values‖²·|⟨φ|ψ⟩|²`, the post-selection probability for normalized `ψ`, `φ`.
    pub fn probability(&self) -> f64 {
        let sq: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let psi = self.selection.psi().norm();
        let phi = self.selection.phi().norm();
        sq * self.selection.overlap().norm_sqr() / (psi * phi).powi(2)
    }
}

pub fn potent_values(
    u: &Unitary,
    meter: &StateVector,
    basis: &OrthonormalBasis,
    sel: &PrePostSelection,
) -> Result<PotentValueSet> {
    let slices = kraus_slices(u, meter, basis)?;
    let values = slices.iter().map(|a| sel.ratio(a)).collect::<Result<Vec<_>>>()?;
    Ok(PotentValueSet {
        basis: basis.clone(),
        values,
        selection: sel.clone(),
        meter_state: meter.clone(),
    })
}

/// `N·Σ_k A_p^(k)|k⟩` normalized and phase-canonicalized.
pub fn apparatus_state_from_potent_values(pvs: &PotentValueSet) -> Result<StateVector> {
    let largest = pvs.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if largest <= ZERO_NORM {
        return Err(Error::EmptyResult { norm: largest });
    }
    pvs.unnormalized_state()?.normalized()
}

/// Weak-coupling approximations to the potent values and the apparatus state.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakLimitApproximation {
    pub weak_value: C64,
    /// `⟨k|Φ⟩·exp(-i·g·A_w·P_w(k|Φ))`, or zero where `⟨k|Φ⟩` vanishes.
    pub values: Vec<C64>,
    /// `exp(-i·g·A_w·P)|Φ⟩`, normalized.
    pub state: StateVector,
}

pub fn weak_limit_potent_values(
    coupling: &CouplingSpec,
    meter: &StateVector,
    basis: &OrthonormalBasis,
    sel: &PrePostSelection,
) -> Result<WeakLimitApproximation> {
    let p = coupling.apparatus_observable();
    if meter.dim() != p.dim() || basis.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "apparatus observable",
            expected: p.dim(),
            found: meter.dim(),
        });
    }
    let aw = weak_value(coupling.system_observable(), sel)?;
    let g = coupling.g();
    let p_meter = p.apply(meter)?;
    let values = basis
        .vectors()
        .iter()
        .map(|k| {
            let amp = k.inner(meter)?;
            if amp.norm() <= METER_AMPLITUDE_FLOOR {
                return Ok(C64::new(0.0, 0.0));
            }
            let pw = k.inner(&p_meter)? / amp;
            Ok(amp * (C64::new(0.0, -g) * aw * pw).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    let shift = general_exponential(p, C64::new(0.0, -g) * aw)?;
    let state = shift.apply(meter)?.normalized()?;
    Ok(WeakLimitApproximation {
        weak_value: aw,
        values,
        state,
    })
}

/// `U_P(φ|ψ) = ⟨φ|U|ψ⟩ / ⟨φ|ψ⟩`, acting on the apparatus.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentOperator {
    matrix: Operator,
    selection: PrePostSelection,
    source: String,
}

impl PotentOperator {
    pub(crate) fn from_parts(matrix: Operator, selection: PrePostSelection, source: impl Into<String>) -> Self {
        Self {
            matrix,
            selection,
            source: source.into(),
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn selection(&self) -> &PrePostSelection {
        &self.selection
    }

    /// Short description of the joint evolution the operator came from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Unnormalized post-selected apparatus state `U_P|Φ⟩`.
    pub fn apply(&self, meter: &StateVector) -> Result<StateVector> {
        self.matrix.apply(meter)
    }
}

pub fn potent_operator(u: &Operator, sel: &PrePostSelection) -> Result<PotentOperator> {
    potent_operator_tagged(u, sel, "joint unitary")
}

pub fn potent_operator_tagged(u: &Operator, sel: &PrePostSelection, source: &str) -> Result<PotentOperator> {
    let system = sel.system_dim();
    if !u.dim().is_multiple_of(system) {
        return Err(Error::DimensionMismatch {
            context: "joint operator over system",
            expected: system,
            found: u.dim(),
        });
    }
    let space = JointSpace::new(system, u.dim() / system)?;
    let numerator = partial_matrix_element(u, space, sel.phi(), sel.psi(), Factor::System)?;
    let matrix = numerator.scaled(sel.overlap().inv());
    Ok(PotentOperator::from_parts(matrix, sel.clone(), source))
}

/// Max entry of `|Σ_n |⟨φ|ψ_n⟩|²·U_P(φ|ψ_n)·U_P(φ|ψ_n)† − I|` over a complete
/// system basis `{ψ_n}`.
pub fn potent_completeness_residual(u: &Unitary, phi: &StateVector, basis: &OrthonormalBasis) -> Result<f64> {
    phi.ensure_normalized()?;
    if basis.dim() != phi.dim() {
        return Err(Error::IncompleteBasis {
            expected: phi.dim(),
            found: basis.dim(),
        });
    }
    let space = split_space(u, u.dim() / phi.dim().max(1))?;
    if space.system_dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            context: "system factor",
            expected: phi.dim(),
            found: space.system_dim(),
        });
    }
    let mut acc = Operator::zeros(space.apparatus_dim());
    for psi_n in basis.vectors() {
        let term = match PrePostSelection::new(psi_n.clone(), phi.clone()) {
            Ok(sel) => {
                let up = potent_operator(u, &sel)?;
                let weight = sel.overlap().norm_sqr();
                up.matrix().checked_mul(&up.matrix().adjoint())?.scaled(C64::new(weight, 0.0))
            }
            Err(Error::OrthogonalSelection { .. }) => {
                let m = partial_matrix_element(u, space, phi, psi_n, Factor::System)?;
                m.checked_mul(&m.adjoint())?
            }
            Err(e) => return Err(e),
        };
        acc = acc.checked_add(&term)?;
    }
    Ok(max_identity_defect(acc.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates, hermitian_exponential};
    use crate::pps::{joint_evolve_and_postselect, modular_value};
    use crate::random;
    use rand::SeedableRng;

    fn amplification() -> PrePostSelection {
        let s = 3f64.sqrt() / 2.0;
        PrePostSelection::new(
            StateVector::from_real(&[s, 0.5]).unwrap(),
            StateVector::from_real(&[s, -0.5]).unwrap(),
        )
        .unwrap()
    }

    fn qubit_meter_unitary(a: &Operator, g: f64) -> Unitary {
        let gen = a.kron(&gates::excited_projector());
        Unitary::new(hermitian_exponential(&gen, c(0.0, -g)).unwrap()).unwrap()
    }

    #[test]
    fn basis_validation() {
        assert!(OrthonormalBasis::new(vec![StateVector::basis(2, 0).unwrap()]).is_err());
        let skew = vec![
            StateVector::from_real(&[1.0, 0.0]).unwrap(),
            StateVector::from_real(&[0.6, 0.8]).unwrap(),
        ];
        assert!(matches!(OrthonormalBasis::new(skew), Err(Error::NonOrthonormalBasis { .. })));
    }

    #[test]
    fn identity_slices_are_meter_amplitudes() {
        let meter = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let basis = OrthonormalBasis::computational(2);
        let slices = kraus_slices(&Unitary::identity(4), &meter, &basis).unwrap();
        for (k, a) in slices.iter().enumerate() {
            let expected = Operator::identity(2).scaled(meter.amplitudes()[k]);
            assert!(a.max_abs_diff(&expected).unwrap() < 1e-15);
        }
        let pvs = potent_values(&Unitary::identity(4), &meter, &basis, &amplification()).unwrap();
        for (v, m) in pvs.values().iter().zip(meter.amplitudes()) {
            assert!((v - m).norm() < 1e-15);
        }
        let state = apparatus_state_from_potent_values(&pvs).unwrap();
        assert!(state.max_abs_diff(&meter.normalized().unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn qubit_meter_slices_match_closed_form() {
        let a = gates::pauli_x();
        let g = 0.9;
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let meter = StateVector::new(vec![alpha, beta]).unwrap();
        let slices = kraus_slices(&qubit_meter_unitary(&a, g), &meter, &OrthonormalBasis::computational(2)).unwrap();
        let a1 = hermitian_exponential(&a, c(0.0, -g)).unwrap().scaled(beta);
        assert!(slices[0].max_abs_diff(&Operator::identity(2).scaled(alpha)).unwrap() < 1e-14);
        assert!(slices[1].max_abs_diff(&a1).unwrap() < 1e-14);
    }

    #[test]
    fn qubit_meter_potent_values_are_alpha_and_beta_modular() {
        let sel = amplification();
        let a = gates::pauli_z();
        let g = 1.1;
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let meter = StateVector::new(vec![alpha, beta]).unwrap();
        let u = qubit_meter_unitary(&a, g);
        let pvs = potent_values(&u, &meter, &OrthonormalBasis::computational(2), &sel).unwrap();
        let m = modular_value(&a, g, &sel).unwrap();
        assert!((pvs.values()[0] - alpha).norm() < 1e-12);
        assert!((pvs.values()[1] - beta * m).norm() < 1e-12);
        let expected = StateVector::new(vec![alpha, beta * m]).unwrap().normalized().unwrap();
        let state = apparatus_state_from_potent_values(&pvs).unwrap();
        assert!(state.max_abs_diff(&expected).unwrap() < 1e-12);

        let up = potent_operator(&u, &sel).unwrap();
        let expected = Operator::diagonal(&[c(1.0, 0.0), m]).unwrap();
        assert!(up.matrix().max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn kraus_completeness_for_random_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = random::unitary(&mut rng, 6);
        let meter = random::state(&mut rng, 3);
        let slices = kraus_slices(&u, &meter, &OrthonormalBasis::computational(3)).unwrap();
        let mut acc = Operator::zeros(2);
        for a in &slices {
            acc = &acc + &(&a.adjoint() * a);
        }
        assert!(acc.max_abs_diff(&Operator::identity(2)).unwrap() < 1e-10);
    }

    #[test]
    fn random_potent_values_reconstruct_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let u = random::unitary(&mut rng, 4);
        let meter = random::state(&mut rng, 2);
        let sel = PrePostSelection::new(random::state(&mut rng, 2), random::state(&mut rng, 2)).unwrap();
        let pvs = potent_values(&u, &meter, &OrthonormalBasis::computational(2), &sel).unwrap();
        let oracle = joint_evolve_and_postselect(&u, sel.psi(), &meter, sel.phi()).unwrap();
        let state = apparatus_state_from_potent_values(&pvs).unwrap();
        assert!(state.max_abs_diff(&oracle.state.normalized().unwrap()).unwrap() < 1e-10);
        assert!((pvs.probability() - oracle.probability).abs() < 1e-10);
    }

    #[test]
    fn zero_coupling_weak_limit_is_the_meter() {
        let meter = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap();
        let p = Operator::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]).unwrap();
        let coupling = CouplingSpec::new(0.0, gates::pauli_z(), p).unwrap();
        let approx =
            weak_limit_potent_values(&coupling, &meter, &OrthonormalBasis::computational(3), &amplification()).unwrap();
        for (v, m) in approx.values.iter().zip(meter.amplitudes()) {
            assert!((v - m).norm() < 1e-15);
        }
        assert!(approx.state.max_abs_diff(&meter).unwrap() < 1e-14);
    }

    #[test]
    fn identity_potent_operator() {
        let up = potent_operator(&Operator::identity(6), &amplification()).unwrap();
        assert!(up.matrix().max_abs_diff(&Operator::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn completeness_for_identity_and_coupled_unitary() {
        let phi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let basis = OrthonormalBasis::computational(2);
        assert!(potent_completeness_residual(&Unitary::identity(4), &phi, &basis).unwrap() < 1e-15);
        let gen = gates::pauli_z().kron(&gates::pauli_x());
        let u = Unitary::new(hermitian_exponential(&gen, c(0.0, -1.3)).unwrap()).unwrap();
        assert!(potent_completeness_residual(&u, &phi, &basis).unwrap() <= 1e-10);
        // φ = |0⟩ is orthogonal to ψ_1 = |1⟩ and takes the overlap-free branch.
        let zero = StateVector::basis(2, 0).unwrap();
        assert!(potent_completeness_residual(&u, &zero, &basis).unwrap() <= 1e-10);
    }
}
