//! Weak values, modular values, potent values and potent operators for
//! pre- and post-selected quantum systems, computed on dense state vectors.

pub mod error;
pub mod linalg;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{Hermitian, JointSpace, Operator, StateVector, Unitary, C64};
pub mod pps;
pub mod meters;
pub mod timemachine;
pub mod verify;
