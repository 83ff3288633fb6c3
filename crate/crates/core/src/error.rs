use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("tensor product needs two operators or two states")]
    KindMismatch,
    #[error("operator is not Hermitian (max |M - M^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not unitary (max |U^dagger U - I| = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("Hermitian eigendecomposition did not converge")]
    EigenFailure,
    #[error("matrix exponent norm {norm:e} exceeds cap {cap:e}")]
    ExponentOverflow { norm: f64, cap: f64 },
    #[error("cannot normalize a vector of norm {norm:e}")]
    ZeroVector { norm: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("pre- and post-selected states are orthogonal (|overlap| = {overlap:e})")]
    OrthogonalSelection { overlap: f64 },
    #[error("basis is not orthonormal (max |G - I| = {defect:e})")]
    NonOrthonormalBasis { defect: f64 },
    #[error("basis has {found} vectors, space dimension is {expected}")]
    IncompleteBasis { expected: usize, found: usize },
    #[error("projector family violates projector axioms (defect {defect:e})")]
    ProjectorAxioms { defect: f64 },
    #[error("{what}: lengths {left} and {right} differ")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("superposition coefficients sum to {re}{im:+}i, not 1")]
    CoefficientSum { re: f64, im: f64 },
    #[error("result state vanishes (norm {norm:e})")]
    EmptyResult { norm: f64 },
    #[error("pointer grid rejected: {0}")]
    Aliasing(String),
    #[error("joint dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
