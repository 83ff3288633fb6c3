use crate::error::{Error, Result};
use crate::linalg::{gates, hermitian_exponential, Operator, StateVector, Unitary, C64};
use crate::pps::{modular_value, PrePostSelection};

/// A meter qubit prepared in `α|0⟩ + β|1⟩`, read out in the `σ_z` eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMeter {
    alpha: C64,
    beta: C64,
}

impl QubitMeter {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn state(&self) -> StateVector {
        StateVector::new(vec![self.alpha, self.beta]).unwrap()
    }

    /// `exp(-i·g·A⊗Π) = I + (exp(-i·g·A) − I)⊗Π` with `Π = |1⟩⟨1|`.
    pub fn coupling_unitary(a: &Operator, g: f64) -> Result<Unitary> {
        let e = hermitian_exponential(a, C64::new(0.0, -g))?;
        let id = Operator::identity(a.dim());
        let joint = &id.kron(&Operator::identity(2)) + &(&e - &id).kron(&gates::excited_projector());
        Ok(Unitary::trusted(joint))
    }

    /// `(α, β·⟨A⟩_M)`.
    pub fn predicted_potent_values(&self, a: &Operator, g: f64, sel: &PrePostSelection) -> Result<[C64; 2]> {
        let m = modular_value(a, g, sel)?;
        Ok([self.alpha, self.beta * m])
    }

    /// `|0⟩⟨0| + ⟨A⟩_M |1⟩⟨1|`.
    pub fn predicted_potent_operator(a: &Operator, g: f64, sel: &PrePostSelection) -> Result<Operator> {
        let m = modular_value(a, g, sel)?;
        Operator::diagonal(&[C64::new(1.0, 0.0), m])
    }

    /// `α|0⟩ + β⟨A⟩_M|1⟩`, unnormalized.
    pub fn predicted_state(&self, a: &Operator, g: f64, sel: &PrePostSelection) -> Result<StateVector> {
        StateVector::new(self.predicted_potent_values(a, g, sel)?.to_vec())
    }
}
