//! Apparatus models: a qubit meter coupled through `|1⟩⟨1|`, and a Gaussian
//! pointer on a periodic position grid coupled through its momentum.

mod pointer;
mod qubit;

pub use pointer::{
    pointer_coupling_unitary, pointer_shift_experiment, pointer_statistics, GaussianPointer, MomentumOperator,
    PointerGrid, PointerShiftReport, PointerStatistics, DEFAULT_DIMENSION_CAP,
};
pub use qubit::QubitMeter;
