use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::DMatrix;

use super::{StateVector, C64, HERMITIAN_TOL, UNITARY_TOL};
use crate::error::{Error, Result};

/// A square complex matrix acting on one Hilbert space factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::InvalidParameter("operator must have dimension >= 1".into()));
        }
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "square operator",
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "operator row length",
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim.max(1), dim.max(1)),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim.max(1), dim.max(1)),
        }
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                context: "outer product",
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        Ok(Self {
            matrix: ket.as_dvector() * bra.as_dvector().adjoint(),
        })
    }

    /// Rank-one projector onto the normalized direction of `v`.
    pub fn projector(v: &StateVector) -> Result<Self> {
        let u = v.unit()?;
        Self::outer(&u, &u)
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert!(matrix.is_square() && matrix.nrows() > 0);
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            matrix: self.matrix.map(|x| x * factor),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_dim(v.dim(), "operator application")?;
        Ok(StateVector::from_dvector(&self.matrix * v.as_dvector()))
    }

    /// `⟨bra|self|ket⟩`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<C64> {
        let image = self.apply(ket)?;
        bra.inner(&image)
    }

    pub fn checked_mul(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim(), "operator product")?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn checked_add(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim(), "operator sum")?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_dim(other.dim(), "operator comparison")?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL
    }

    pub fn unitary_defect(&self) -> f64 {
        let gram = self.matrix.adjoint() * &self.matrix;
        max_identity_defect(&gram)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_defect() <= UNITARY_TOL
    }

    /// Max entry of `|P² - P|` and `|P - P†|`.
    pub fn projector_defect(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        let idem = sq
            .iter()
            .zip(self.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        idem.max(self.hermitian_defect())
    }

    fn check_dim(&self, found: usize, context: &'static str) -> Result<()> {
        if self.dim() != found {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

pub(crate) fn max_identity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for ((i, j), x) in m.iter().enumerate().map(|(k, x)| ((k % m.nrows(), k / m.nrows()), x)) {
        let target = if i == j { 1.0 } else { 0.0 };
        worst = worst.max((x - C64::new(target, 0.0)).norm());
    }
    worst
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    /// Panics on dimension mismatch; use [`Operator::checked_mul`] otherwise.
    fn mul(self, rhs: &'a Operator) -> Operator {
        self.checked_mul(rhs).expect("operator dimensions must agree")
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        self.checked_add(rhs).expect("operator dimensions must agree")
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must agree");
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// An operator certified Hermitian to [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(Operator);

impl Hermitian {
    pub fn new(op: Operator) -> Result<Self> {
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self(op))
    }

    /// Replaces `M` by `(M + M†)/2`, for matrices that are Hermitian up to rounding.
    pub fn symmetrized(op: &Operator) -> Self {
        let m = op.matrix();
        Self(Operator::from_matrix_unchecked((m + m.adjoint()).map(|x| x * 0.5)))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }
}

impl Deref for Hermitian {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

/// An operator certified unitary to [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(Operator);

impl Unitary {
    pub fn new(op: Operator) -> Result<Self> {
        let defect = op.unitary_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self(op))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Operator::identity(dim))
    }

    /// Wraps an operator that is unitary by construction.
    pub(crate) fn trusted(op: Operator) -> Self {
        debug_assert!(op.dim() > 256 || op.unitary_defect() <= UNITARY_TOL);
        Self(op)
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn kron(&self, other: &Unitary) -> Unitary {
        Unitary::trusted(self.0.kron(&other.0))
    }
}

impl Deref for Unitary {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}
