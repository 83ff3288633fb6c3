use nalgebra::DMatrix;

use super::{Operator, StateVector, C64};
use crate::error::{Error, Result};

/// Composite space `H_system ⊗ H_apparatus` with system-major flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointSpace {
    system_dim: usize,
    apparatus_dim: usize,
}

impl JointSpace {
    pub fn new(system_dim: usize, apparatus_dim: usize) -> Result<Self> {
        if system_dim == 0 || apparatus_dim == 0 {
            return Err(Error::InvalidParameter("factor dimensions must be >= 1".into()));
        }
        Ok(Self {
            system_dim,
            apparatus_dim,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_dim
    }

    pub fn dim(&self) -> usize {
        self.system_dim * self.apparatus_dim
    }

    pub fn index(&self, s: usize, a: usize) -> usize {
        s * self.apparatus_dim + a
    }

    pub fn factor_dim(&self, factor: Factor) -> usize {
        match factor {
            Factor::System => self.system_dim,
            Factor::Apparatus => self.apparatus_dim,
        }
    }

    pub fn check_operator(&self, op: &Operator) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "joint operator",
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    System,
    Apparatus,
}

/// Contracts `u` with `⟨bra| · |ket⟩` on `factor`, leaving an operator on the
/// other factor.
pub fn partial_matrix_element(
    u: &Operator,
    space: JointSpace,
    bra: &StateVector,
    ket: &StateVector,
    factor: Factor,
) -> Result<Operator> {
    space.check_operator(u)?;
    let contracted = space.factor_dim(factor);
    for v in [bra, ket] {
        if v.dim() != contracted {
            return Err(Error::DimensionMismatch {
                context: "partial matrix element",
                expected: contracted,
                found: v.dim(),
            });
        }
    }
    let m = u.matrix();
    let bra = bra.amplitudes();
    let ket = ket.amplitudes();
    let out = match factor {
        Factor::System => {
            let d = space.apparatus_dim();
            let mut out = DMatrix::<C64>::zeros(d, d);
            for (s, b) in bra.iter().enumerate() {
                if b.norm() == 0.0 {
                    continue;
                }
                for (t, k) in ket.iter().enumerate() {
                    let w = b.conj() * k;
                    if w.norm() == 0.0 {
                        continue;
                    }
                    let block = m.view((space.index(s, 0), space.index(t, 0)), (d, d));
                    out.zip_apply(&block, |o, x| *o += w * x);
                }
            }
            out
        }
        Factor::Apparatus => {
            let d = space.system_dim();
            let a_dim = space.apparatus_dim();
            DMatrix::from_fn(d, d, |s, t| {
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in bra.iter().enumerate() {
                    let row = space.index(s, a);
                    for (a2, k) in ket.iter().enumerate() {
                        acc += b.conj() * m[(row, t * a_dim + a2)] * k;
                    }
                }
                acc
            })
        }
    };
    Ok(Operator::from_matrix_unchecked(out))
}

/// Either kind of object that can enter a Kronecker product.
#[derive(Debug, Clone, PartialEq)]
pub enum Tensorable {
    State(StateVector),
    Operator(Operator),
}

pub fn tensor_product(x: &Tensorable, y: &Tensorable) -> Result<Tensorable> {
    match (x, y) {
        (Tensorable::State(a), Tensorable::State(b)) => Ok(Tensorable::State(a.kron(b))),
        (Tensorable::Operator(a), Tensorable::Operator(b)) => Ok(Tensorable::Operator(a.kron(b))),
        _ => Err(Error::KindMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates};

    #[test]
    fn identity_kron_identity() {
        let out = tensor_product(
            &Tensorable::Operator(Operator::identity(2)),
            &Tensorable::Operator(Operator::identity(3)),
        )
        .unwrap();
        assert_eq!(out, Tensorable::Operator(Operator::identity(6)));
    }

    #[test]
    fn basis_kron_lands_on_system_major_index() {
        let out = StateVector::basis(2, 0).unwrap().kron(&StateVector::basis(2, 1).unwrap());
        assert_eq!(out, StateVector::basis(4, 1).unwrap());
        let space = JointSpace::new(2, 2).unwrap();
        assert_eq!(space.index(0, 1), 1);
        assert_eq!(space.index(1, 0), 2);
    }

    #[test]
    fn sigma_z_kron_excited_projector() {
        let out = gates::pauli_z().kron(&gates::excited_projector());
        let expected = Operator::diagonal(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let r = tensor_product(
            &Tensorable::State(StateVector::basis(2, 0).unwrap()),
            &Tensorable::Operator(Operator::identity(2)),
        );
        assert_eq!(r, Err(Error::KindMismatch));
    }

    #[test]
    fn identity_contraction() {
        let space = JointSpace::new(2, 3).unwrap();
        let zero = StateVector::basis(2, 0).unwrap();
        let out = partial_matrix_element(&Operator::identity(6), space, &zero, &zero, Factor::System).unwrap();
        assert_eq!(out, Operator::identity(3));
    }

    #[test]
    fn factorized_operator_contracts_to_apparatus_factor() {
        let space = JointSpace::new(2, 2).unwrap();
        let b = gates::pauli_y();
        let u = Operator::identity(2).kron(&b);
        let psi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let out = partial_matrix_element(&u, space, &psi, &psi, Factor::System).unwrap();
        assert!(out.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn cnot_contracted_on_plus_state() {
        let space = JointSpace::new(2, 2).unwrap();
        let plus = gates::plus_state();
        let out = partial_matrix_element(&gates::cnot(), space, &plus, &plus, Factor::System).unwrap();
        let expected = (&Operator::identity(2) + &gates::pauli_x()).scaled(c(0.5, 0.0));
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn wrong_factor_dimension_is_rejected() {
        let space = JointSpace::new(2, 3).unwrap();
        let v = StateVector::basis(3, 0).unwrap();
        let r = partial_matrix_element(&Operator::identity(6), space, &v, &v, Factor::System);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let r = partial_matrix_element(&Operator::identity(5), space, &v, &v, Factor::Apparatus);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
