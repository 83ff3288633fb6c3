use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Hermitian, Operator, StateVector, Unitary, C64};
use crate::error::{Error, Result};

/// Largest 1-norm of `scale·M` accepted by [`general_exponential`].
pub const EXPONENT_NORM_CAP: f64 = 1e4;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenpairs of a Hermitian operator: `H = V·diag(λ)·V†`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> StateVector {
        StateVector::from_dvector(self.eigenvectors.column(j).into_owned())
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Operator {
        let diag = DVector::from_iterator(self.eigenvalues.len(), self.eigenvalues.iter().map(|&l| f(l)));
        let mut scaled = self.eigenvectors.clone();
        for (j, d) in diag.iter().enumerate() {
            let mut col = scaled.column_mut(j);
            col *= *d;
        }
        Operator::from_matrix_unchecked(scaled * self.eigenvectors.adjoint())
    }
}

impl Hermitian {
    pub fn eigen(&self) -> Result<SpectralDecomposition> {
        let eig = SymmetricEigen::try_new(self.matrix().clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::EigenFailure)?;
        Ok(SpectralDecomposition {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    /// `exp(-i·t·H)`.
    pub fn evolution(&self, t: f64) -> Result<Unitary> {
        let spec = self.eigen()?;
        Ok(Unitary::trusted(spec.map(|l| C64::new(0.0, -t * l).exp())))
    }
}

/// `exp(scale·H)` for Hermitian `H`, through its eigendecomposition.
pub fn hermitian_exponential(h: &Operator, scale: C64) -> Result<Operator> {
    let h = Hermitian::new(h.clone())?;
    let spec = h.eigen()?;
    Ok(spec.map(|l| (scale * l).exp()))
}

// Padé [13/13] numerator coefficients for scaling and squaring.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(scale·M)` for any square `M`, by scaling and squaring around a
/// degree-13 Padé approximant.
pub fn general_exponential(m: &Operator, scale: C64) -> Result<Operator> {
    let a = m.matrix().map(|x| x * scale);
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm1.is_finite() || norm1 > EXPONENT_NORM_CAP {
        return Err(Error::ExponentOverflow {
            norm: norm1,
            cap: EXPONENT_NORM_CAP,
        });
    }
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.map(|x| x / 2f64.powi(squarings));

    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &a * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let denom = (&v - &u).lu();
    let mut r = denom
        .solve(&(&v + &u))
        .ok_or_else(|| Error::InvalidParameter("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(Operator::from_matrix_unchecked(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, gates};
    use std::f64::consts::FRAC_PI_2;

    fn diag_minus_i_i() -> Operator {
        Operator::diagonal(&[c(0.0, -1.0), c(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn zero_exponent_is_identity() {
        let h = gates::pauli_x();
        let id = Operator::identity(2);
        assert!(hermitian_exponential(&h, c(0.0, 0.0)).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        assert!(general_exponential(&h, c(0.0, 0.0)).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
    }

    #[test]
    fn quarter_turn_of_sigma_z() {
        let z = gates::pauli_z();
        let scale = c(0.0, -FRAC_PI_2);
        let expected = diag_minus_i_i();
        let herm = hermitian_exponential(&z, scale).unwrap();
        let gen = general_exponential(&z, scale).unwrap();
        assert!(herm.max_abs_diff(&expected).unwrap() < 1e-14);
        assert!(gen.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn identity_generator_gives_global_phase() {
        let g = 0.3;
        let u = hermitian_exponential(&Operator::identity(3), c(0.0, -g)).unwrap();
        let expected = Operator::identity(3).scaled(c(0.0, -g).exp());
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let n = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = general_exponential(&n, c(1.0, 0.0)).unwrap();
        let expected = Operator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(e.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected_by_hermitian_route() {
        let n = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_exponential(&n, c(1.0, 0.0)), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn large_exponent_rejected() {
        let z = gates::pauli_z();
        assert!(matches!(
            general_exponential(&z, c(2e4, 0.0)),
            Err(Error::ExponentOverflow { .. })
        ));
    }

    #[test]
    fn squaring_branch_matches_eigen_route() {
        let h = Operator::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, -2.0), c(0.0, 0.3)],
            vec![c(0.5, 2.0), c(-3.0, 0.0), c(1.1, 0.0)],
            vec![c(0.0, -0.3), c(1.1, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        for scale in [c(0.0, -7.5), c(0.4, 0.0), c(0.2, -3.0)] {
            let a = hermitian_exponential(&h, scale).unwrap();
            let b = general_exponential(&h, scale).unwrap();
            let mag = a.matrix().iter().map(|x| x.norm()).fold(1.0, f64::max);
            assert!(a.max_abs_diff(&b).unwrap() / mag < 1e-10, "scale {scale}");
        }
    }
}
