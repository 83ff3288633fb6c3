//! Pre- and post-selected systems: weak and modular values, potent values,
//! potent operators, and the exact joint-evolution oracle they reduce from.

mod conditional;
mod potent;

pub use conditional::{
    assemble_apparatus_controlled, assemble_system_controlled, check_projector_family,
    potent_operator_apparatus_controlled, potent_operator_system_controlled, ConditionalPotentOperator,
};
pub use potent::{
    apparatus_state_from_potent_values, kraus_slices, potent_completeness_residual, potent_operator,
    potent_operator_tagged, potent_values, weak_limit_potent_values, OrthonormalBasis, PotentOperator,
    PotentValueSet, WeakLimitApproximation,
};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_exponential, Hermitian, JointSpace, Operator, StateVector, Unitary, C64};

/// Selections whose normalized overlap is at or below this are rejected.
pub const OVERLAP_EPS: f64 = 1e-10;

/// A pre-selected state `ψ` and post-selected state `φ` of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct PrePostSelection {
    psi: StateVector,
    phi: StateVector,
    overlap: C64,
}

impl PrePostSelection {
    pub fn new(psi: StateVector, phi: StateVector) -> Result<Self> {
        Self::with_threshold(psi, phi, OVERLAP_EPS)
    }

    /// Rejects the pair when `|⟨φ|ψ⟩| / (‖φ‖‖ψ‖) <= threshold`.
    pub fn with_threshold(psi: StateVector, phi: StateVector, threshold: f64) -> Result<Self> {
        let overlap = phi.inner(&psi)?;
        let scale = psi.norm() * phi.norm();
        if scale == 0.0 || overlap.norm() / scale <= threshold {
            return Err(Error::OrthogonalSelection {
                overlap: if scale == 0.0 { 0.0 } else { overlap.norm() / scale },
            });
        }
        Ok(Self { psi, phi, overlap })
    }

    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    pub fn phi(&self) -> &StateVector {
        &self.phi
    }

    /// `⟨φ|ψ⟩`.
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn system_dim(&self) -> usize {
        self.psi.dim()
    }

    /// `⟨φ|X|ψ⟩ / ⟨φ|ψ⟩`.
    pub fn ratio(&self, x: &Operator) -> Result<C64> {
        self.check_system_dim(x.dim())?;
        Ok(x.matrix_element(&self.phi, &self.psi)? / self.overlap)
    }

    fn check_system_dim(&self, found: usize) -> Result<()> {
        if found != self.system_dim() {
            return Err(Error::DimensionMismatch {
                context: "system factor",
                expected: self.system_dim(),
                found,
            });
        }
        Ok(())
    }

    fn ensure_normalized(&self) -> Result<()> {
        self.psi.ensure_normalized()?;
        self.phi.ensure_normalized()
    }
}

/// Impulsive von Neumann coupling `g·A⊗P` between a system observable `A`
/// and an apparatus observable `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    g: f64,
    system: Hermitian,
    apparatus: Hermitian,
}

impl CouplingSpec {
    pub fn new(g: f64, system: Operator, apparatus: Operator) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling strength {g} is not finite")));
        }
        Ok(Self {
            g,
            system: Hermitian::new(system)?,
            apparatus: Hermitian::new(apparatus)?,
        })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn system_observable(&self) -> &Hermitian {
        &self.system
    }

    pub fn apparatus_observable(&self) -> &Hermitian {
        &self.apparatus
    }

    pub fn with_strength(&self, g: f64) -> Result<Self> {
        Self::new(g, self.system.operator().clone(), self.apparatus.operator().clone())
    }

    pub fn space(&self) -> JointSpace {
        JointSpace::new(self.system.dim(), self.apparatus.dim()).expect("observables are non-empty")
    }

    /// `exp(-i·g·A⊗P)`.
    pub fn unitary(&self) -> Result<Unitary> {
        let generator = self.system.kron(&self.apparatus);
        let u = hermitian_exponential(&generator, C64::new(0.0, -self.g))?;
        Ok(Unitary::trusted(u))
    }
}

/// `⟨φ|A|ψ⟩ / ⟨φ|ψ⟩`.
pub fn weak_value(a: &Operator, sel: &PrePostSelection) -> Result<C64> {
    sel.ratio(a)
}

/// `⟨φ|exp(-i·g·A)|ψ⟩ / ⟨φ|ψ⟩`.
pub fn modular_value(a: &Operator, g: f64, sel: &PrePostSelection) -> Result<C64> {
    sel.check_system_dim(a.dim())?;
    let e = hermitian_exponential(a, C64::new(0.0, -g))?;
    sel.ratio(&e)
}

/// `(1 - ⟨A⟩_M(g)) / (i·g)`, which tends to the weak value as `g → 0`.
pub fn weak_value_from_modular(a: &Operator, g: f64, sel: &PrePostSelection) -> Result<C64> {
    if g == 0.0 {
        return Err(Error::InvalidParameter("coupling strength must be nonzero".into()));
    }
    let m = modular_value(a, g, sel)?;
    Ok((C64::new(1.0, 0.0) - m) / C64::new(0.0, g))
}

/// Unnormalized apparatus state after post-selection, with its squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelected {
    pub state: StateVector,
    pub probability: f64,
}

/// Exact route: `(⟨φ|⊗I)·U·(|ψ⟩⊗|Φ⟩)` and its squared norm.
pub fn joint_evolve_and_postselect(
    u: &Unitary,
    psi: &StateVector,
    meter: &StateVector,
    phi: &StateVector,
) -> Result<PostSelected> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            context: "post-selected state",
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    for v in [psi, meter, phi] {
        v.ensure_normalized()?;
    }
    let space = JointSpace::new(psi.dim(), meter.dim())?;
    space.check_operator(u)?;
    let evolved = u.apply(&psi.kron(meter))?;
    let joint = evolved.amplitudes();
    let d = space.apparatus_dim();
    let mut out = vec![C64::new(0.0, 0.0); d];
    for (s, f) in phi.amplitudes().iter().enumerate() {
        let w = f.conj();
        for (a, o) in out.iter_mut().enumerate() {
            *o += w * joint[space.index(s, a)];
        }
    }
    let state = StateVector::new(out)?;
    let probability = state.norm().powi(2);
    Ok(PostSelected { state, probability })
}

/// Which state supplies `⟨P⟩` in the first-order probability formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeterExpectation {
    /// `⟨Φ|P|Φ⟩`, the apparatus expectation.
    #[default]
    Apparatus,
    /// `⟨ψ|P|ψ⟩` taken literally; only defined when the factors have equal dimension.
    LiteralSystem,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityComparison {
    pub first_order: f64,
    pub exact: f64,
}

/// First-order post-selection probability `|⟨φ|ψ⟩|²(1 + 2g·Im⟨A⟩_w·⟨P⟩)`
/// next to the exact value from the oracle.
pub fn postselection_probability_weak(
    coupling: &CouplingSpec,
    sel: &PrePostSelection,
    meter: &StateVector,
    convention: MeterExpectation,
) -> Result<ProbabilityComparison> {
    sel.ensure_normalized()?;
    let p = coupling.apparatus_observable();
    let mean_p = match convention {
        MeterExpectation::Apparatus => p.matrix_element(meter, meter)?.re,
        MeterExpectation::LiteralSystem => p.matrix_element(sel.psi(), sel.psi())?.re,
    };
    let aw = weak_value(coupling.system_observable(), sel)?;
    let base = sel.overlap().norm_sqr();
    let first_order = base * (1.0 + 2.0 * coupling.g() * aw.im * mean_p);
    let exact = joint_evolve_and_postselect(&coupling.unitary()?, sel.psi(), meter, sel.phi())?.probability;
    Ok(ProbabilityComparison { first_order, exact })
}
