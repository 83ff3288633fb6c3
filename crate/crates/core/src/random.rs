//! Seedable samplers for states, observables and unitaries.
//!
//! Every sampler draws from a caller-supplied generator so that randomized
//! checks are reproducible from a seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Hermitian, Operator, StateVector, Unitary, C64};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Nonzero complex scale factor with modulus in `[0.1, 10]`.
pub fn nonzero_scale<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let modulus = 10f64.powf(rng.gen_range(-1.0..1.0));
    C64::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng))
}

/// Uniformly distributed unit vector.
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let v = StateVector::new((0..dim).map(|_| complex_normal(rng)).collect()).unwrap();
        if let Ok(u) = v.unit() {
            return u;
        }
    }
}

/// Hermitian matrix `(G + G†)/2` from a Ginibre draw.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Hermitian {
    Hermitian::symmetrized(&Operator::from_matrix_unchecked(ginibre(rng, dim)))
}

/// Haar-random unitary from the QR factorization of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Unitary {
    let qr = ginibre(rng, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Unitary::new(Operator::from_matrix_unchecked(q)).expect("QR factor is unitary")
}

/// Columns of a Haar-random unitary, as an orthonormal basis.
pub fn orthonormal_vectors<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<StateVector> {
    let u = unitary(rng, dim);
    (0..dim)
        .map(|j| StateVector::from_dvector(u.matrix().column(j).into_owned()))
        .collect()
}
