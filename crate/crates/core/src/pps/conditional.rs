//! Potent operators of conditional unitaries, controlled either by the
//! system (`Σ_n Π_n ⊗ U_n`) or by the apparatus (`Σ_n V_n ⊗ P_n`).

use super::{potent::PotentOperator, PrePostSelection};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_exponential, max_identity_defect, Hermitian, Operator, Unitary, C64};

/// Tolerance for `Π_n² = Π_n`, `Π_n Π_m = 0` and `Σ_n Π_n = I`.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// A conditional potent operator together with the scalar coefficients
/// (weak values or modular values) that weight each branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPotentOperator {
    pub operator: PotentOperator,
    pub coefficients: Vec<C64>,
}

impl ConditionalPotentOperator {
    /// `|Σ_n c_n − 1|`.
    pub fn coefficient_sum_residual(&self) -> f64 {
        (self.coefficients.iter().sum::<C64>() - C64::new(1.0, 0.0)).norm()
    }
}

/// Checks that `projectors` are orthogonal projectors resolving the identity on `dim`.
pub fn check_projector_family(projectors: &[Operator], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::ProjectorAxioms { defect: 1.0 });
    }
    let mut sum = Operator::zeros(dim);
    for (n, p) in projectors.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "projector",
                expected: dim,
                found: p.dim(),
            });
        }
        let defect = p.projector_defect();
        if defect > PROJECTOR_TOL {
            return Err(Error::ProjectorAxioms { defect });
        }
        for q in &projectors[n + 1..] {
            let cross = p.checked_mul(q)?.max_abs_diff(&Operator::zeros(dim))?;
            if cross > PROJECTOR_TOL {
                return Err(Error::ProjectorAxioms { defect: cross });
            }
        }
        sum = sum.checked_add(p)?;
    }
    let defect = max_identity_defect(sum.matrix());
    if defect > PROJECTOR_TOL {
        return Err(Error::ProjectorAxioms { defect });
    }
    Ok(())
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch {
            what: "branch operators",
            left,
            right,
        });
    }
    Ok(())
}

/// `Σ_n Π_n ⊗ U_n`.
pub fn assemble_system_controlled(projectors: &[Operator], unitaries: &[Unitary]) -> Result<Unitary> {
    check_lengths(projectors.len(), unitaries.len())?;
    let sys = projectors.first().map(Operator::dim).unwrap_or(1);
    check_projector_family(projectors, sys)?;
    let app = unitaries[0].dim();
    let mut acc = Operator::zeros(sys * app);
    for (p, u) in projectors.iter().zip(unitaries) {
        acc = acc.checked_add(&p.kron(u))?;
    }
    Ok(Unitary::trusted(acc))
}

/// `Σ_n exp(-iλA_n) ⊗ P_n`.
pub fn assemble_apparatus_controlled(generators: &[Operator], projectors: &[Operator], lambda: f64) -> Result<Unitary> {
    check_lengths(generators.len(), projectors.len())?;
    let app = projectors.first().map(Operator::dim).unwrap_or(1);
    check_projector_family(projectors, app)?;
    let sys = generators[0].dim();
    let mut acc = Operator::zeros(sys * app);
    for (a, p) in generators.iter().zip(projectors) {
        let v = Hermitian::new(a.clone())?.evolution(lambda)?;
        acc = acc.checked_add(&v.operator().kron(p))?;
    }
    Ok(Unitary::trusted(acc))
}

/// `U_P = Σ_n ⟨Π_n⟩_w U_n`.
pub fn potent_operator_system_controlled(
    projectors: &[Operator],
    unitaries: &[Unitary],
    sel: &PrePostSelection,
) -> Result<ConditionalPotentOperator> {
    check_lengths(projectors.len(), unitaries.len())?;
    check_projector_family(projectors, sel.system_dim())?;
    let app = unitaries[0].dim();
    let mut matrix = Operator::zeros(app);
    let mut coefficients = Vec::with_capacity(projectors.len());
    for (p, u) in projectors.iter().zip(unitaries) {
        let w = sel.ratio(p)?;
        matrix = matrix.checked_add(&u.scaled(w))?;
        coefficients.push(w);
    }
    Ok(ConditionalPotentOperator {
        operator: PotentOperator::from_parts(matrix, sel.clone(), "system-controlled"),
        coefficients,
    })
}

/// `U_P = Σ_n ⟨A_n⟩_M P_n` with `⟨A_n⟩_M = ⟨φ|exp(-iλA_n)|ψ⟩ / ⟨φ|ψ⟩`.
pub fn potent_operator_apparatus_controlled(
    generators: &[Operator],
    projectors: &[Operator],
    lambda: f64,
    sel: &PrePostSelection,
) -> Result<ConditionalPotentOperator> {
    check_lengths(generators.len(), projectors.len())?;
    let app = projectors.first().map(Operator::dim).unwrap_or(1);
    check_projector_family(projectors, app)?;
    let mut matrix = Operator::zeros(app);
    let mut coefficients = Vec::with_capacity(generators.len());
    for (a, p) in generators.iter().zip(projectors) {
        let v = hermitian_exponential(a, C64::new(0.0, -lambda))?;
        let m = sel.ratio(&v)?;
        matrix = matrix.checked_add(&p.scaled(m))?;
        coefficients.push(m);
    }
    Ok(ConditionalPotentOperator {
        operator: PotentOperator::from_parts(matrix, sel.clone(), "apparatus-controlled"),
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates, StateVector};
    use crate::pps::potent_operator;

    fn sel() -> PrePostSelection {
        PrePostSelection::new(
            StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap(),
            StateVector::from_real(&[0.8, 0.6]).unwrap(),
        )
        .unwrap()
    }

    fn computational_projectors() -> Vec<Operator> {
        (0..2)
            .map(|k| Operator::projector(&StateVector::basis(2, k).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn single_block_reduces_to_its_unitary() {
        let u1 = Hermitian::new(gates::pauli_y()).unwrap().evolution(0.4).unwrap();
        let out = potent_operator_system_controlled(&[Operator::identity(2)], &[u1.clone()], &sel()).unwrap();
        assert!(out.operator.matrix().max_abs_diff(&u1).unwrap() < 1e-15);
        assert!(out.coefficient_sum_residual() < 1e-15);
    }

    #[test]
    fn qubit_control_matches_generic_potent_operator() {
        let u0 = Unitary::identity(2);
        let u1 = Hermitian::new(gates::pauli_x()).unwrap().evolution(0.8).unwrap();
        let projectors = computational_projectors();
        let unitaries = vec![u0, u1];
        let reduced = potent_operator_system_controlled(&projectors, &unitaries, &sel()).unwrap();
        let joint = assemble_system_controlled(&projectors, &unitaries).unwrap();
        let direct = potent_operator(&joint, &sel()).unwrap();
        assert!(reduced.operator.matrix().max_abs_diff(direct.matrix()).unwrap() <= 1e-12);
        assert!(reduced.coefficient_sum_residual() <= 1e-12);
    }

    #[test]
    fn zero_lambda_gives_identity() {
        let gens = vec![gates::pauli_z(), gates::pauli_x()];
        let out = potent_operator_apparatus_controlled(&gens, &computational_projectors(), 0.0, &sel()).unwrap();
        assert!(out.operator.matrix().max_abs_diff(&Operator::identity(2)).unwrap() < 1e-15);
        assert!(out.coefficients.iter().all(|m| (m - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn single_apparatus_block_scales_identity() {
        let out = potent_operator_apparatus_controlled(&[gates::pauli_z()], &[Operator::identity(2)], 0.6, &sel())
            .unwrap();
        let m = crate::pps::modular_value(&gates::pauli_z(), 0.6, &sel()).unwrap();
        assert!(out.operator.matrix().max_abs_diff(&Operator::identity(2).scaled(m)).unwrap() < 1e-14);
    }

    #[test]
    fn two_block_apparatus_control_matches_generic() {
        let gens = vec![gates::pauli_z(), gates::pauli_x()];
        let projectors = computational_projectors();
        let lambda = 1.2;
        let reduced = potent_operator_apparatus_controlled(&gens, &projectors, lambda, &sel()).unwrap();
        let joint = assemble_apparatus_controlled(&gens, &projectors, lambda).unwrap();
        let direct = potent_operator(&joint, &sel()).unwrap();
        assert!(reduced.operator.matrix().max_abs_diff(direct.matrix()).unwrap() <= 1e-12);
    }

    #[test]
    fn broken_projector_families_are_rejected() {
        let p = Operator::projector(&StateVector::basis(2, 0).unwrap()).unwrap();
        // Does not sum to identity.
        assert!(matches!(check_projector_family(&[p.clone()], 2), Err(Error::ProjectorAxioms { .. })));
        // Overlapping projectors.
        let q = Operator::projector(&StateVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        assert!(matches!(check_projector_family(&[p.clone(), q], 2), Err(Error::ProjectorAxioms { .. })));
        // Not idempotent.
        let half = Operator::identity(2).scaled(c(0.5, 0.0));
        assert!(matches!(
            check_projector_family(&[half.clone(), half], 2),
            Err(Error::ProjectorAxioms { .. })
        ));
    }
}
