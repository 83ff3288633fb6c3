use nalgebra::DVector;

use super::{C64, PHASE_PIVOT, NORMALIZED_TOL, ZERO_NORM};
use crate::error::{Error, Result};

/// A pure state as a column of complex amplitudes. Not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state must have dimension >= 1".into()));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                context: "basis index",
                expected: dim,
                found: index,
            });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: DVector::zeros(dim.max(1)),
        }
    }

    pub(crate) fn from_dvector(amplitudes: DVector<C64>) -> Self {
        debug_assert!(!amplitudes.is_empty());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other, "inner product")?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORMALIZED_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }

    /// Rescales by a positive real so that the norm is one. The phase is left alone.
    pub fn unit(&self) -> Result<Self> {
        let n = self.norm();
        if n <= ZERO_NORM {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(n),
        })
    }

    /// Unit norm with the first significant amplitude made real and positive.
    pub fn normalized(&self) -> Result<Self> {
        Ok(self.unit()?.canonical_phase())
    }

    /// Removes the global phase so that the first amplitude with modulus
    /// above `PHASE_PIVOT` is real and positive. The norm is unchanged.
    pub fn canonical_phase(&self) -> Self {
        match self.amplitudes.iter().find(|a| a.norm() > PHASE_PIVOT) {
            Some(pivot) => {
                let phase = pivot.conj() / pivot.norm();
                Self {
                    amplitudes: self.amplitudes.map(|a| a * phase),
                }
            }
            None => self.clone(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.map(|a| a * factor),
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_dim(other, "state sum")?;
        Ok(Self {
            amplitudes: &self.amplitudes + &other.amplitudes,
        })
    }

    /// Kronecker product `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &StateVector) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other, "state comparison")?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `|⟨self|other⟩|` for two states after rescaling both to unit norm.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.unit()?.inner(&other.unit()?)?.norm())
    }

    fn check_dim(&self, other: &StateVector, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<C64> {
    u.inner(v)
}

pub fn norm(v: &StateVector) -> f64 {
    v.norm()
}

pub fn normalize(v: &StateVector) -> Result<StateVector> {
    v.normalized()
}
