//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! Joint spaces are always ordered system ⊗ apparatus, with flattened index
//! `s * apparatus_dim + a`. Units are chosen so that ħ = 1.

mod expm;
mod joint;
mod operator;
mod state;

pub mod gates;

pub use expm::{general_exponential, hermitian_exponential, SpectralDecomposition, EXPONENT_NORM_CAP};
pub use joint::{partial_matrix_element, tensor_product, Factor, JointSpace, Tensorable};
pub use operator::{Hermitian, Operator, Unitary};
pub(crate) use operator::max_identity_defect;
pub use state::{inner_product, norm, normalize, StateVector};

pub use num_complex::Complex64 as C64;

/// Maximum entry of `|M - M†|` accepted for a Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum entry of `|U†U - I|` accepted for a unitary operator.
pub const UNITARY_TOL: f64 = 1e-10;
/// Allowed deviation of `‖v‖` from one for a state treated as normalized.
pub const NORMALIZED_TOL: f64 = 1e-12;
/// Vectors with norm at or below this cannot be normalized.
pub const ZERO_NORM: f64 = 1e-14;
/// First amplitude above this modulus fixes the global phase in [`normalize`].
pub const PHASE_PIVOT: f64 = 1e-12;
/// Gram-matrix tolerance for orthonormal bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
