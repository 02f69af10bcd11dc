//! States, Pauli strings, and exact linear-algebra queries.
//!
//! This module is the ground truth the sampling pipeline is verified
//! against: density matrices with validated invariants, Pauli strings with
//! packed codes, exact expectations and decompositions, partial traces,
//! and the trace-norm / Frobenius error metrics.

mod matrix;
mod pauli;
mod state;

pub use matrix::ComplexMatrix;
pub use pauli::{PauliLetter, PauliString, Subset};
pub use state::{
    make_state, one_norm_distance, pauli_matrix, DensityMatrix, StateSpec, EIGENVALUE_FLOOR,
    EXPECTATION_IMAG_TOLERANCE, HERMITICITY_TOLERANCE, TRACE_TOLERANCE,
};
