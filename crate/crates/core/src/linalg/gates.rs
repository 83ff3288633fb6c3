//! Named single-qubit operators.

use super::{c, Operator, StateVector};

pub fn pauli_x() -> Operator {
    Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
}

/// `|1⟩⟨1|`, the qubit-meter coupling projector.
pub fn excited_projector() -> Operator {
    Operator::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap()
}

/// Controlled-NOT with the first (system) qubit as control.
pub fn cnot() -> Operator {
    Operator::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .unwrap()
}

/// `(|0⟩ + |1⟩)/√2`.
pub fn plus_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_real(&[h, h]).unwrap()
}
